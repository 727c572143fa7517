"""Scripted adversaries used to sanity-check the experiment harness."""

from __future__ import annotations

import random
from typing import Optional, Tuple

from ..crypto_suite import ToyKem
from ..key_schedule import KeySchedule, Transcript
from ..protocol.records import open_record
from ..protocol.session import INIT, RESP
from ..protocol.wire import decode_message, split_stream
from .model import HakeExperiment


def relay_stage(
    exp: HakeExperiment, init: Tuple[int, int], resp: Tuple[int, int], drop_last: bool = False
) -> list:
    """Passively relay one stage between two sessions; returns the wire messages in order."""
    seen = []
    to_resp = exp.send(*init, b"")
    while to_resp:
        seen += split_stream(to_resp)
        to_init = exp.send(*resp, to_resp)
        if not to_init:
            break
        msgs = split_stream(to_init)
        if drop_last and msgs[-1][0] == 8:
            seen += msgs
            break
        seen += msgs
        to_resp = exp.send(*init, to_init)
    return seen


def _honest_pair(exp: HakeExperiment) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    s = exp.create(0, 1, INIT)
    r = exp.create(1, 0, RESP)
    return (0, s), (1, r)


def coin_flip(seed: Optional[int] = None):
    """Passive adversary that tests an honest stage and guesses uniformly."""
    coin = random.Random(seed)

    def adversary(exp: HakeExperiment) -> int:
        init, resp = _honest_pair(exp)
        relay_stage(exp, init, resp)
        exp.test(*init, 1)
        return coin.getrandbits(1)

    return adversary


def reveal_then_test(exp: HakeExperiment) -> int:
    """Trivial breach: reveal the stage key, then test the same stage."""
    init, resp = _honest_pair(exp)
    relay_stage(exp, init, resp)
    real = exp.reveal(*init, 1)
    return int(exp.test(*init, 1) == real)


def toy_kem_breaker(exp: HakeExperiment) -> int:
    """White-box attack on the insecure toy KEM.

    Learns k_q through CompromiseSK (allowed: the CompromiseQK clause still
    holds), recovers every KEM shared secret from public values, replays the
    key schedule over the observed transcript and compares with the Test
    answer.
    """
    init, resp = _honest_pair(exp)
    wires = relay_stage(exp, init, resp)
    challenge = exp.test(*init, 1)
    k_q = exp.compromise_sk(*init, 1)
    suite = exp.suite
    if challenge is None or k_q is None or suite.kem_c is not None:
        return 0
    pk_init = exp.parties[init[0]].credentials.certificate.public_key
    pk_resp = exp.parties[resp[0]].credentials.certificate.public_key
    msgs = {w[0]: w for w in wires}

    sched = KeySchedule(suite.prf, label_binding=exp.label_binding, rats_mode=exp.rats_mode)
    ts = Transcript(suite.hash)
    _, pk_pq, _, _ = decode_message(msgs[1]).fields
    _, ct_pq, _ = decode_message(msgs[2]).fields
    for name, value in (
        ("ss_c", b""),
        ("ss_pq", ToyKem.break_encapsulation(pk_pq, ct_pq)),
        ("k_q", k_q),
        ("sec_state_in", b""),
    ):
        sched.set(name, value)
    ts.record(1, msgs[1])
    ts.record(2, msgs[2])
    sched.derive_handshake_secrets(ts)
    ts.record(3, msgs[3])
    ct_i = open_record(suite, sched["IHTS"], decode_message(msgs[4]), 0)
    sched.set("ss_I", ToyKem.break_encapsulation(pk_resp, ct_i))
    ts.record(4, msgs[4])
    sched.derive_authenticated_secrets(ts)
    ts.record(5, msgs[5])
    ct_r = open_record(suite, sched["RAHTS"], decode_message(msgs[6]), 0)
    sched.set("ss_R", ToyKem.break_encapsulation(pk_init, ct_r))
    ts.record(6, msgs[6])
    sched.derive_master_and_finished(ts)
    ts.record(7, msgs[7])
    ts.record(8, msgs[8])
    sched.derive_application_and_state(ts)
    return int(sched.session_key() == challenge)
