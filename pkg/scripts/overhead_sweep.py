"""Envelope size as a function of payload length, for every protection mode.

Writes one CSV row per (mode, payload length) and reports the largest
payload that still fits a single LoRa DR6 packet under each mode.
"""

from __future__ import annotations

import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

from swarmdid import didcomm, diotcomm
from swarmdid.bench import LORA_MAX_PACKET
from swarmdid.identity import build_identity, seeded_rng


@dataclass
class SweepConfig:
    out: Path = Path("results/overhead_sweep.csv")
    max_payload: int = 512
    step: int = 1
    seed: int = 0


def envelopes(a, b, rng):
    return {
        "diotcomm-sign": lambda p: diotcomm.sign(p, a),
        "diotcomm-encrypt": lambda p: diotcomm.encrypt(p, a, b.ddo, rng),
        "diotcomm-sign-encrypt": lambda p: diotcomm.sign_encrypt(p, a, b.ddo, rng),
        "didcomm-sign": lambda p: didcomm.jose_sign(p, a, b.did, rng),
        "didcomm-encrypt": lambda p: didcomm.jose_encrypt(p, a, b.ddo, rng),
        "didcomm-sign-encrypt": lambda p: didcomm.jose_sign_encrypt(p, a, b.ddo, rng),
    }


def main(cfg: SweepConfig) -> None:
    rng = seeded_rng(cfg.seed)
    a, b = build_identity("https://a.example/", rng), build_identity("https://b.example/", rng)
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    largest: dict[str, int] = {}
    with cfg.out.open("w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["mode", "payload_bytes", "total_bytes", "overhead_bytes", "fits_lora"])
        for mode, make in envelopes(a, b, rng).items():
            largest[mode] = -1
            for n in range(0, cfg.max_payload + 1, cfg.step):
                # binary payloads: the baseline carries them as base64 attachments
                total = len(make(rng(n)))
                writer.writerow([mode, n, total, total - n, str(total <= LORA_MAX_PACKET).lower()])
                if total <= LORA_MAX_PACKET:
                    largest[mode] = n
    for mode, n in largest.items():
        print(f"{mode:<22} largest single-packet payload: {n if n >= 0 else 'none'}")
    print(f"wrote {cfg.out}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=SweepConfig.out)
    p.add_argument("--max-payload", type=int, default=SweepConfig.max_payload)
    p.add_argument("--step", type=int, default=SweepConfig.step)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    a = p.parse_args()
    main(SweepConfig(a.out, a.max_payload, a.step, a.seed))
