"""Shared test plumbing: record re-sealing and a tamper-region map."""

from mucklesharp.protocol import open_record, seal_record
from mucklesharp.protocol.wire import FIELD_PREFIX, HEADER_LEN, SEQ_LEN, decode_message

RECORD_SECRETS = {3: ("RHTS", 0), 4: ("IHTS", 0), 5: ("IAHTS", 0), 6: ("RAHTS", 0), 7: ("IAHTS", 1), 8: ("RAHTS", 1)}


def reseal(session, wire, transform):
    """Decrypt a record with the sender's keys, transform the plaintext, re-encrypt."""
    msg = decode_message(wire)
    secret, seq = RECORD_SECRETS[msg.msg_type]
    key = session.stage.schedule[secret]
    plain = open_record(session.cfg.suite, key, msg, seq)
    return seal_record(session.cfg.suite, key, msg.msg_type, seq, transform(plain))


def regions(wire):
    """Label every byte position of a wire message by its role."""
    msg = decode_message(wire)
    out = ["header"] * HEADER_LEN
    if msg.msg_type in (1, 2):
        names = ["pk_c", "pk_pq", "n_I", "key_id"] if msg.msg_type == 1 else ["ct_c", "ct_pq", "n_R"]
        for name, f in zip(names, msg.fields):
            out += ["prefix"] * FIELD_PREFIX + [name] * len(f)
    else:
        out += ["seq"] * SEQ_LEN + ["prefix"] * FIELD_PREFIX + ["ciphertext"] * len(msg.fields[0])
    assert len(out) == len(wire)
    return out
