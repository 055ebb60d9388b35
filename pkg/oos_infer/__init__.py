"""oos-infer - out-of-sample predictive inference for machine-learning forecasters."""

__version__ = "0.1.0"
__author__ = "Development Team"
__email__ = "dev@company.com"
