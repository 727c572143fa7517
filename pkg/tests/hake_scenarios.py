"""Table of cleanness-predicate scenarios with hand-evaluated expectations.

Each builder drives a fresh experiment and returns ``(experiment, target)``.
Sessions: (0, s) is P0's initiator session, (1, r) is P1's responder session.
"""

import random

from mucklesharp.hake import HakeExperiment
from mucklesharp.protocol import INIT, RESP, Session, SessionConfig
from mucklesharp.protocol.wire import split_stream


def setup(seed=1, n_stages=3):
    exp = HakeExperiment(2, 4, n_stages, seed=seed)
    s = exp.create(0, 1, INIT)
    r = exp.create(1, 0, RESP)
    return exp, (0, s), (1, r)


def step_relay(exp, init, resp, hooks=None, drop=()):
    """Relay one stage message by message; ``hooks[i]`` runs right after m_i is delivered."""
    hooks = hooks or {}
    queue = [(resp, w) for w in split_stream(exp.send(*init, b""))]
    while queue:
        target, wire = queue.pop(0)
        if wire[0] in drop:
            continue
        out = exp.send(*target, wire)
        if wire[0] in hooks:
            hooks[wire[0]]()
        if out:
            other = init if target == resp else resp
            queue += [(other, w) for w in split_stream(out)]


def shadow_relay(exp, target, shadow_party, hooks=None):
    """Drive ``target`` against a session that lives outside the experiment.

    The shadow uses the partner's real credentials and the experiment's KMS,
    so the target accepts while no experiment session is its origin.
    """
    hooks = hooks or {}
    i, s = target
    role = exp.role(i, s)
    party = exp.parties[shadow_party]
    cfg = SessionConfig(party.pid, exp.parties[i].pid, exp.suite, party.credentials, trust_store=exp.trust)
    shadow = Session(cfg, RESP if role == INIT else INIT, exp.kms, random.Random(77))
    if role == INIT:
        to_target = [None]
        pending = split_stream(exp.send(i, s, b""))
        to_shadow = pending
    else:
        to_shadow = []
        to_target = shadow.start()
    while to_shadow or to_target:
        for w in [w for w in to_target if w is not None]:
            out = exp.send(i, s, w)
            if w[0] in hooks:
                hooks[w[0]]()
            to_shadow = split_stream(out) if out else []
        to_target = []
        for w in to_shadow:
            to_target += shadow.receive(w)
        to_shadow = []


def s_passive():
    exp, a, b = setup()
    step_relay(exp, a, b)
    return exp, (*a, 1)


def s_reveal_target():
    exp, a, b = setup()
    step_relay(exp, a, b)
    exp.reveal(*a, 1)
    return exp, (*a, 1)


def s_reveal_other_stage():
    exp, a, b = setup()
    step_relay(exp, a, b)
    step_relay(exp, a, b)
    exp.reveal(*a, 1)
    return exp, (*a, 2)


def s_reveal_matching_partner():
    exp, a, b = setup()
    step_relay(exp, a, b)
    exp.reveal(*b, 1)
    return exp, (*a, 1)


def s_reveal_partner_other_stage():
    exp, a, b = setup()
    step_relay(exp, a, b)
    step_relay(exp, a, b)
    exp.reveal(*b, 2)
    return exp, (*a, 1)


def s_init_qk_before_and_sk():
    exp, a, b = setup()
    step_relay(exp, a, b, hooks={1: lambda: exp.compromise_qk(*a, 1)})
    exp.compromise_sk(*a, 1)
    return exp, (*a, 1)


def s_init_qk_after_and_sk():
    exp, a, b = setup()
    step_relay(exp, a, b)
    exp.compromise_qk(*a, 1)
    exp.compromise_sk(*a, 1)
    return exp, (*a, 1)


def s_init_qk_before_only():
    exp, a, b = setup()
    step_relay(exp, a, b, hooks={1: lambda: exp.compromise_qk(*a, 1)})
    return exp, (*a, 1)


def s_init_sk_only():
    exp, a, b = setup()
    step_relay(exp, a, b)
    exp.compromise_sk(*a, 1)
    return exp, (*a, 1)


def s_resp_partner_qk_before_and_sk():
    exp, a, b = setup()
    step_relay(exp, a, b, hooks={1: lambda: exp.compromise_qk(*a, 1)})
    exp.compromise_sk(*a, 1)
    return exp, (*b, 1)


def s_resp_partner_qk_after_and_sk():
    exp, a, b = setup()
    step_relay(exp, a, b)
    exp.compromise_qk(*a, 1)
    exp.compromise_sk(*a, 1)
    return exp, (*b, 1)


def s_resp_own_queries_only():
    # responder-role target: the clause looks at the partner, not the tested session
    exp, a, b = setup()
    step_relay(exp, a, b, hooks={1: lambda: exp.compromise_qk(*b, 1)})
    exp.compromise_sk(*b, 1)
    return exp, (*b, 1)


def s_init_partner_queries_only():
    # initiator-role target: the clause looks at the tested session, not the partner
    exp, a, b = setup()
    step_relay(exp, a, b, hooks={1: lambda: exp.compromise_qk(*b, 1)})
    exp.compromise_sk(*b, 1)
    return exp, (*a, 1)


def s_origin_without_match():
    # m8 dropped: responder accepted, initiator is its origin but not a match
    exp, a, b = setup()
    step_relay(exp, a, b, hooks={1: lambda: exp.compromise_qk(*a, 1)}, drop=(8,))
    exp.compromise_sk(*a, 1)
    exp.corrupt_qk(1)
    return exp, (*b, 1)


def s_no_origin_clean():
    exp, a, b = setup()
    shadow_relay(exp, b, shadow_party=0)
    return exp, (*b, 1)


def s_no_origin_corrupt_before_and_sk():
    exp, a, b = setup()
    exp.corrupt_qk(1)
    shadow_relay(exp, b, shadow_party=0, hooks={1: lambda: exp.compromise_sk(*b, 1)})
    return exp, (*b, 1)


def s_no_origin_corrupt_before_only():
    exp, a, b = setup()
    exp.corrupt_qk(1)
    shadow_relay(exp, b, shadow_party=0)
    return exp, (*b, 1)


def s_no_origin_sk_only():
    exp, a, b = setup()
    shadow_relay(exp, b, shadow_party=0)
    exp.compromise_sk(*b, 1)
    return exp, (*b, 1)


def s_no_origin_corrupt_after_and_sk():
    exp, a, b = setup()
    shadow_relay(exp, b, shadow_party=0)
    exp.corrupt_qk(1)
    exp.compromise_sk(*b, 1)
    return exp, (*b, 1)


def s_no_origin_initiator_target():
    exp, a, b = setup()
    exp.corrupt_qk(0)
    shadow_relay(exp, a, shadow_party=1)
    exp.compromise_sk(*a, 1)
    return exp, (*a, 1)


def s_no_origin_other_party_corrupted():
    # CorruptQK of some other party does not count against the tested one
    exp, a, b = setup()
    exp.corrupt_qk(0)
    shadow_relay(exp, b, shadow_party=0)
    exp.compromise_sk(*b, 1)
    return exp, (*b, 1)


# (name, builder, expected clean, condition of HakeExperiment.clean exercised)
SCENARIOS = [
    ("passive-no-queries", s_passive, True, "all"),
    ("reveal-tested-stage", s_reveal_target, False, "1 violated"),
    ("reveal-other-stage", s_reveal_other_stage, True, "1 satisfied"),
    ("reveal-matching-partner", s_reveal_matching_partner, False, "2 violated"),
    ("reveal-partner-other-stage", s_reveal_partner_other_stage, True, "2 satisfied"),
    ("init-qk-before-accept+sk", s_init_qk_before_and_sk, False, "3 initiator violated"),
    ("init-qk-after-accept+sk", s_init_qk_after_and_sk, True, "3 initiator timing"),
    ("init-qk-before-only", s_init_qk_before_only, True, "3 initiator sk clause"),
    ("init-sk-only", s_init_sk_only, True, "3 initiator qk clause"),
    ("init-partner-queries-only", s_init_partner_queries_only, True, "3 role split"),
    ("resp-partner-qk-before+sk", s_resp_partner_qk_before_and_sk, False, "3 responder violated"),
    ("resp-partner-qk-after+sk", s_resp_partner_qk_after_and_sk, True, "3 responder timing"),
    ("resp-own-queries-only", s_resp_own_queries_only, True, "3 role split"),
    ("origin-without-match", s_origin_without_match, True, "3 and 4 vacuous"),
    ("no-origin-clean", s_no_origin_clean, True, "4 satisfied"),
    ("no-origin-corrupt-before+sk", s_no_origin_corrupt_before_and_sk, False, "4 violated"),
    ("no-origin-corrupt-before-only", s_no_origin_corrupt_before_only, True, "4 sk clause"),
    ("no-origin-sk-only", s_no_origin_sk_only, True, "4 corrupt clause"),
    ("no-origin-corrupt-after+sk", s_no_origin_corrupt_after_and_sk, True, "4 timing"),
    ("no-origin-initiator-target", s_no_origin_initiator_target, False, "4 violated, initiator"),
    ("no-origin-other-party", s_no_origin_other_party_corrupted, True, "4 wrong party"),
]
