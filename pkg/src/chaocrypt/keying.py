"""SHA-512 key derivation: digest -> 48-bit kappas -> map initial conditions.

The cipher keys itself on SHA-512(plaintext) (paper-faithful mode) or on
SHA-512(user secret).  The first 12 hex characters of the digest form kappa1,
characters 13-24 form kappa2; dividing by 2^48 yields the TD-ERCS and NCA
initial conditions.  A kappa of 0 is remapped to 1 (condition 2^-48), since 0
is a fixed point of both maps.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass

from .errors import EmptyInput, MalformedDigest, ParameterError

TWO_48 = 1 << 48

_HEX128 = re.compile(r"[0-9a-f]{128}\Z")


@dataclass(frozen=True)
class MapParams:
    """Fixed map parameters not derived from the hash (configuration)."""

    mu: float = 0.7
    alpha: float = 1.0
    j: int = 3
    alpha_nca: float = 1.2
    beta_nca: float = 5.0

    def __post_init__(self):
        if not 0.0 < self.mu < 1.0:
            raise ParameterError(f"mu must be in (0, 1), got {self.mu}")
        if not 0.0 < self.alpha < math.pi:
            raise ParameterError(f"alpha must be in (0, pi), got {self.alpha}")
        if abs(self.alpha - math.pi / 2) < 1e-12:
            raise ParameterError("alpha too close to pi/2: tan(alpha) must stay finite")
        if not isinstance(self.j, int) or self.j < 2:
            raise ParameterError(f"j must be an integer >= 2, got {self.j}")
        if not 0.0 < self.alpha_nca <= 1.4:
            raise ParameterError(f"alpha_nca must be in (0, 1.4], got {self.alpha_nca}")
        if not 5.0 <= self.beta_nca <= 43.6:
            raise ParameterError(f"beta_nca must be in [5, 43.6], got {self.beta_nca}")


@dataclass(frozen=True)
class KeyMaterial:
    """Derived initial conditions plus the fixed map parameters.

    y0 drives TD-ERCS, x0_nca drives NCA; both equal kappa/2^48 exactly
    (48-bit integers are exact in 64-bit floats).  digest_hex is kept for
    audit when the material came from a full digest; material rebuilt from
    an envelope header carries only the kappas.
    """

    y0: float
    x0_nca: float
    kappa1: int
    kappa2: int
    map_params: MapParams
    digest_hex: str | None = None


def hash_plaintext(data: bytes) -> str:
    """SHA-512 of the exact byte sequence, as 128 lowercase hex chars."""
    if len(data) == 0:
        raise EmptyInput("refusing to hash an empty byte sequence")
    return hashlib.sha512(bytes(data)).hexdigest()


def _remap_zero(kappa: int) -> int:
    # kappa = 0 stalls both maps (x = 0 is a fixed point); use the smallest
    # representable condition instead.
    return kappa if kappa != 0 else 1


def key_from_kappas(kappa1: int, kappa2: int, params: MapParams,
                    digest_hex: str | None = None) -> KeyMaterial:
    """Build key material from raw 48-bit kappas (e.g. from an envelope header)."""
    if not 0 <= kappa1 < TWO_48 or not 0 <= kappa2 < TWO_48:
        raise ParameterError("kappas must be 48-bit integers")
    kappa1 = _remap_zero(kappa1)
    kappa2 = _remap_zero(kappa2)
    return KeyMaterial(
        y0=kappa1 / TWO_48,
        x0_nca=kappa2 / TWO_48,
        kappa1=kappa1,
        kappa2=kappa2,
        map_params=params,
        digest_hex=digest_hex,
    )


def derive_key(digest_hex: str, params: MapParams) -> KeyMaterial:
    """Kappas from hex chars 1-12 and 13-24 of the digest; conditions kappa/2^48."""
    digest_hex = digest_hex.lower()
    if not _HEX128.match(digest_hex):
        raise MalformedDigest("digest must be 128 hex characters")
    kappa1 = int(digest_hex[0:12], 16)
    kappa2 = int(digest_hex[12:24], 16)
    return key_from_kappas(kappa1, kappa2, params, digest_hex=digest_hex)


def key_from_plaintext(data: bytes, params: MapParams) -> KeyMaterial:
    """Paper-faithful keying: derive from SHA-512 of the plaintext itself."""
    return derive_key(hash_plaintext(data), params)


def key_from_user_secret(secret: bytes, params: MapParams) -> KeyMaterial:
    """Derive from SHA-512 of a user secret instead of the plaintext."""
    return derive_key(hash_plaintext(secret), params)
