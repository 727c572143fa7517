"""Deterministic full-handshake test vectors in ``name = hex`` format."""

from __future__ import annotations

import random

from .errors import HarnessError
from .key_schedule import DERIVED, INPUTS, format_vectors
from .protocol import get_suite, make_pair, run_stage
from .qkd import KeyManagementService

FLAG_NAMES = ("suite", "label_binding", "rats_mode", "seed")


def emit_vectors(
    seed: int,
    suite_name: str = "toy",
    *,
    label_binding: str = "table",
    rats_mode: str = "figure",
) -> str:
    """Run one seeded stage and dump its inputs, wire messages and derived secrets.

    The output depends only on the arguments: the same seed gives a
    byte-identical file.
    """
    suite = get_suite(suite_name)
    rng = random.Random(seed)
    kms = KeyManagementService(random.Random(rng.getrandbits(64)))
    kms.add_link("alice", "bob")
    init, resp = make_pair(suite, kms, rng, label_binding=label_binding, rats_mode=rats_mode)
    outcome = run_stage(init, resp)
    if not outcome.both_accepted:
        raise HarnessError(f"vector handshake failed: {outcome.reason}")
    sched = init.stage.schedule
    if dict(sched.items()) != dict(resp.stage.schedule.items()):
        raise HarnessError("initiator and responder schedules disagree")
    flags = (suite_name, label_binding, rats_mode, str(seed))
    text = "".join(f"{k} = {v}\n" for k, v in zip(FLAG_NAMES, flags))
    text += format_vectors([(name, sched[name]) for name in INPUTS])
    text += format_vectors([(f"m{i}", outcome.messages[i]) for i in range(1, 9)])
    text += format_vectors([(name, sched[name]) for name in DERIVED])
    text += format_vectors([("session_key", sched.session_key())])
    return text
