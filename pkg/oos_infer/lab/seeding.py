"""Per-replication seeds derived from one master seed."""

import numpy as np

from oos_infer.lab.dgp import DGP_CODES, DgpKind


def replication_seed(master_seed: int, kind: DgpKind, T: int, pi_index: int, rep: int) -> int:
    """First 64-bit word of SeedSequence(master_seed, spawn_key=(dgp, T, pi, rep)).

    Each replication depends only on its own key, so adding replications or
    changing the worker count leaves earlier draws untouched.
    """
    sequence = np.random.SeedSequence(entropy=master_seed, spawn_key=(DGP_CODES[kind], T, pi_index, rep))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])
