"""Dealing phase: modulus selection, secret hashing, and share distribution.

The dealer builds two degree-(t-1) polynomials over Z_d, one hiding the
secret and one hiding its SHA1 digest reduced mod d, and hands player i the
pair of evaluations at x = i. Shares travel over an abstract authenticated
channel; their physical encoding is out of scope here.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import InvalidThreshold, SecretOutOfRange, ValueOutOfRange
from .field import FieldElement, Polynomial, PrimeModulus, eval_poly, is_prime


@dataclass(frozen=True)
class DealerConfig:
    n: int
    t: int
    secret: int
    rng_seed: int = 0
    d_override: int | None = None


@dataclass(frozen=True)
class SharePacket:
    """One player's view after dealing: x = player_id and both evaluations."""

    player_id: int
    x: FieldElement
    f_share: FieldElement
    g_share: FieldElement

    def to_json(self) -> dict:
        return {
            "player_id": self.player_id,
            "x": self.x.value,
            "f_share": self.f_share.value,
            "g_share": self.g_share.value,
            "d": self.x.modulus.d,
        }


def choose_modulus(n: int) -> PrimeModulus:
    """Smallest prime in (n, 2n]; exists for every n >= 1 by Bertrand."""
    if n < 1:
        raise ValueOutOfRange("player count must be at least 1")
    for p in range(n + 1, 2 * n + 1):
        if is_prime(p):
            return PrimeModulus(p)
    raise AssertionError(f"no prime in ({n}, {2 * n}]")  # unreachable


def hash_to_field(secret: int, d: PrimeModulus) -> FieldElement:
    """SHA1 of the secret's 8-byte big-endian encoding, reduced mod d."""
    if secret < 0:
        raise ValueOutOfRange("secret must be non-negative")
    digest = hashlib.sha1(secret.to_bytes(8, "big")).digest()
    return FieldElement(int.from_bytes(digest, "big") % d.d, d)


def deal(config: DealerConfig) -> tuple[PrimeModulus, list[SharePacket]]:
    """Draw both polynomials from the seeded rng and evaluate at x = 1..n."""
    if not 1 <= config.t <= config.n:
        raise InvalidThreshold(f"need 1 <= t <= n, got t={config.t}, n={config.n}")
    if config.d_override is not None:
        if config.d_override <= config.n:
            raise ValueOutOfRange(
                f"d={config.d_override} must exceed n={config.n} for distinct share points"
            )
        modulus = PrimeModulus(config.d_override)
    else:
        modulus = choose_modulus(config.n)
    if not 0 <= config.secret < modulus.d:
        raise SecretOutOfRange(f"secret {config.secret} not in [0, {modulus.d})")

    rng = np.random.default_rng(config.rng_seed)
    f = _random_polynomial(modulus.element(config.secret), config.t, rng)
    g = _random_polynomial(hash_to_field(config.secret, modulus), config.t, rng)
    packets = [
        SharePacket(
            player_id=i,
            x=modulus.element(i),
            f_share=eval_poly(f, modulus.element(i)),
            g_share=eval_poly(g, modulus.element(i)),
        )
        for i in range(1, config.n + 1)
    ]
    return modulus, packets


def _random_polynomial(
    constant: FieldElement, t: int, rng: np.random.Generator
) -> Polynomial:
    # Coefficients uniform over all of Z_d; a zero leading coefficient only
    # lowers the effective degree, which never hurts reconstruction.
    mod = constant.modulus
    coeffs = (constant,) + tuple(
        mod.element(int(v)) for v in rng.integers(0, mod.d, size=t - 1)
    )
    return Polynomial(coeffs)
