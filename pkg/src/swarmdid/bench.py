"""Size benchmark: DID/DDo sizes and envelope overheads.

Rows cover the identifier and document comparison against other DID
methods, a signed DID Document under each envelope/serialization pair,
and a small signed-then-encrypted application message.  Sizes of foreign
DID methods are published constants, labelled ``reference-from-paper``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, fields

from . import codec, didcomm, diotcomm
from .codec import DdoWireFormat
from .fixtures import APP_MESSAGE, reference_identity
from .identity import Rng, build_identity, system_rng

LORA_MAX_PACKET = 242  # LoRaWAN DR6 maximum payload

MEASURED = "measured"
REFERENCE = "reference-from-paper"

# (method, DID bytes, DDo bytes); two keys and one endpoint where applicable
OTHER_METHODS = [
    ("did:sov", 30, 499),
    ("did:ockam", 39, 779),
    ("did:io", 49, 1112),
    ("did:v1", 54, 1182),
    ("did:tangle", 92, 853),
]


@dataclass(frozen=True)
class SizeRow:
    experiment: str
    label: str
    serialization: str
    envelope: str
    total_bytes: int
    payload_bytes: int
    overhead_bytes: int
    fits_lora: bool
    source: str = MEASURED

    @classmethod
    def of(cls, experiment: str, label: str, serialization: str, envelope: str, total: int, payload: int,
           source: str = MEASURED) -> SizeRow:
        return cls(experiment, label, serialization, envelope, total, payload, total - payload,
                   total <= LORA_MAX_PACKET, source)


CSV_COLUMNS = [f.name for f in fields(SizeRow)]


@dataclass
class SizeReport:
    rows: list[SizeRow]

    def select(self, experiment: str, **match: str) -> list[SizeRow]:
        return [r for r in self.rows if r.experiment == experiment
                and all(getattr(r, k) == v for k, v in match.items())]

    def one(self, experiment: str, **match: str) -> SizeRow:
        (row,) = self.select(experiment, **match)
        return row

    def overhead_ratio(self) -> float:
        """Baseline over DIoTComm overhead for the signed-then-encrypted message."""
        base = self.one("message", envelope="didcomm-sign-encrypt").overhead_bytes
        ours = self.one("message", envelope="diotcomm-sign-encrypt").overhead_bytes
        return base / ours

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({**asdict(row), "fits_lora": str(row.fits_lora).lower()})
        return buf.getvalue()

    def render(self) -> str:
        headers = ["experiment", "label", "ser.", "envelope", "total", "payload", "overhead", "LoRa", "source"]
        body = [[r.experiment, r.label, r.serialization, r.envelope, str(r.total_bytes), str(r.payload_bytes),
                 str(r.overhead_bytes), "yes" if r.fits_lora else "no", r.source] for r in self.rows]
        widths = [max(len(x) for x in col) for col in zip(headers, *body)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() for line in [headers, *body]]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines.append("")
        lines.append(f"sign-encrypt overhead ratio (DIDComm / DIoTComm): {self.overhead_ratio():.2f}")
        return "\n".join(lines)


def build_report(rng: Rng = system_rng) -> SizeReport:
    rows: list[SizeRow] = []
    ref = reference_identity()
    doc = ref.ddo

    rows.append(SizeRow.of("methods", "did:sw DID", "binary", "none", len(doc.did.binary), len(doc.did.binary)))
    di_len = len(codec.encode(doc, DdoWireFormat.CBOR_DI))
    rows.append(SizeRow.of("methods", "did:sw DDo", DdoWireFormat.CBOR_DI.value, "none", di_len, di_len))
    for method, did_size, ddo_size in OTHER_METHODS:
        rows.append(SizeRow.of("methods", f"{method} DID", "text", "none", did_size, did_size, REFERENCE))
        rows.append(SizeRow.of("methods", f"{method} DDo", "json", "none", ddo_size, ddo_size, REFERENCE))

    for fmt in DdoWireFormat:
        payload = codec.encode(doc, fmt)
        rows.append(SizeRow.of("ddo", "reference DDo", fmt.value, "none", len(payload), len(payload)))
    for fmt in DdoWireFormat:
        payload = codec.encode(doc, fmt)
        env = didcomm.jose_sign(payload, ref, rng=rng)
        rows.append(SizeRow.of("signed-ddo", "reference DDo", fmt.value, "didcomm-sign", len(env), len(payload)))
    for fmt in DdoWireFormat:
        payload = codec.encode(doc, fmt)
        env = diotcomm.sign(payload, ref)
        rows.append(SizeRow.of("signed-ddo", "reference DDo", fmt.value, "diotcomm-sign", len(env), len(payload)))

    alice = build_identity("https://alice.example/a", rng)
    bob = build_identity("https://bob.example/b", rng)
    msg = APP_MESSAGE
    base = didcomm.jose_sign_encrypt(msg, alice, bob.ddo, rng)
    ours = diotcomm.sign_encrypt(msg, alice, bob.ddo, rng)
    rows.append(SizeRow.of("message", f"{len(msg)}-byte CBOR message", "cbor", "didcomm-sign-encrypt", len(base), len(msg)))
    rows.append(SizeRow.of("message", f"{len(msg)}-byte CBOR message", "cbor", "diotcomm-sign-encrypt", len(ours), len(msg)))
    return SizeReport(rows)
