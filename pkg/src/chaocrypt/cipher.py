"""End-to-end confusion/diffusion pipeline for images, with an audio adapter.

Encryption: derive key material (SHA-512 of the plaintext, or of a user
secret) -> TD-ERCS row permutation -> NCA column permutation -> NCA keystream
bytes floor(mod(gamma * 1e14, 256)) XORed in -> S-box substitution -> a
self-describing binary envelope.  Decryption applies the inverse stages in
reverse order and is byte-exact.

Keystream gammas are drawn from the same NCA orbit, continued past the
column draws.  Iterates below 1e-10 are skipped for keystream use only: the
*1e14 modular fold needs ~14 significant decimal digits, and NCA orbits
periodically dive far below that scale, which would flood the low byte
values (the column argsort is unaffected and uses the raw orbit).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from . import maps, sbox
from .errors import (
    BadMagic,
    DimensionMismatch,
    KeyUnavailable,
    LengthMismatch,
    MalformedImage,
    ParameterError,
)
from .keying import (
    TWO_48,
    KeyMaterial,
    MapParams,
    key_from_kappas,
    key_from_plaintext,
    key_from_user_secret,
)

PLAINTEXT_HASH = "plaintext-hash"
USER_SECRET = "user-secret"

DEFAULT_BURN_IN = 500

KEYSTREAM_SCALE = 1e14
# Below this the *1e14 fold spans too few byte periods to mix (see module doc).
KEYSTREAM_MIN_GAMMA = 1e-10

MAGIC = b"CHE1"
ENVELOPE_VERSION = 1
PAYLOAD_IMAGE = 0
PAYLOAD_AUDIO = 1

# magic, version, key_mode, payload_kind, reserved, width, height,
# trailing_pad, sample_rate, burn_in, j, mu, alpha, alpha_nca, beta_nca,
# kappa1||kappa2 as 24 hex chars (zero bytes in user-secret mode).
_HEADER = struct.Struct("<4s4B6I4d24s")
HEADER_SIZE = _HEADER.size  # 88 bytes

_KEY_MODE_CODES = {PLAINTEXT_HASH: 0, USER_SECRET: 1}
_KEY_MODE_NAMES = {v: k for k, v in _KEY_MODE_CODES.items()}


@dataclass(frozen=True)
class CipherConfig:
    """How to key the cipher and which map parameters to run."""

    key_mode: str = PLAINTEXT_HASH
    secret: bytes | None = None
    map_params: MapParams = field(default_factory=MapParams)
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if self.key_mode not in _KEY_MODE_CODES:
            raise ParameterError(f"unknown key mode {self.key_mode!r}")
        if (self.secret is not None) != (self.key_mode == USER_SECRET):
            raise ParameterError("secret must be given exactly when key_mode is user-secret")
        if self.burn_in < 0:
            raise ParameterError(f"burn_in must be >= 0, got {self.burn_in}")


@dataclass(frozen=True)
class CipherEnvelope:
    """Self-describing ciphertext container (fixed 88-byte header + body)."""

    key_mode: str
    payload_kind: int
    width: int
    height: int
    trailing_pad: int
    sample_rate: int
    burn_in: int
    map_params: MapParams
    kappa_hex: str  # 24 hex chars in plaintext-hash mode, "" otherwise
    body: bytes

    def to_bytes(self) -> bytes:
        kappas = self.kappa_hex.encode("ascii") if self.kappa_hex else b"\x00" * 24
        header = _HEADER.pack(
            MAGIC,
            ENVELOPE_VERSION,
            _KEY_MODE_CODES[self.key_mode],
            self.payload_kind,
            0,
            self.width,
            self.height,
            self.trailing_pad,
            self.sample_rate,
            self.burn_in,
            self.map_params.j,
            self.map_params.mu,
            self.map_params.alpha,
            self.map_params.alpha_nca,
            self.map_params.beta_nca,
            kappas,
        )
        return header + self.body

    @classmethod
    def from_bytes(cls, blob: bytes) -> "CipherEnvelope":
        if len(blob) < HEADER_SIZE:
            raise LengthMismatch(f"envelope shorter than its {HEADER_SIZE}-byte header")
        (magic, version, mode_code, payload_kind, _reserved, width, height,
         trailing_pad, sample_rate, burn_in, j, mu, alpha, alpha_nca,
         beta_nca, kappas) = _HEADER.unpack(blob[:HEADER_SIZE])
        if magic != MAGIC:
            raise BadMagic(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != ENVELOPE_VERSION:
            raise BadMagic(f"unsupported envelope version {version}")
        if mode_code not in _KEY_MODE_NAMES:
            raise BadMagic(f"unknown key-mode code {mode_code}")
        body = blob[HEADER_SIZE:]
        if len(body) != width * height:
            raise LengthMismatch(
                f"body is {len(body)} bytes, expected {width}x{height} = {width * height}")
        kappa_hex = kappas.decode("ascii") if kappas != b"\x00" * 24 else ""
        return cls(
            key_mode=_KEY_MODE_NAMES[mode_code],
            payload_kind=payload_kind,
            width=width,
            height=height,
            trailing_pad=trailing_pad,
            sample_rate=sample_rate,
            burn_in=burn_in,
            map_params=MapParams(mu=mu, alpha=alpha, j=j,
                                 alpha_nca=alpha_nca, beta_nca=beta_nca),
            kappa_hex=kappa_hex,
            body=body,
        )


def validate_image(img) -> np.ndarray:
    """Coerce to a 2-D uint8 matrix with both sides >= 2."""
    img = np.asarray(img)
    if img.ndim != 2:
        raise MalformedImage(f"expected a 2-D pixel matrix, got shape {img.shape}")
    if img.dtype != np.uint8:
        raise MalformedImage(f"expected uint8 pixels, got dtype {img.dtype}")
    if img.shape[0] < 2 or img.shape[1] < 2:
        raise MalformedImage(f"image must be at least 2x2, got {img.shape}")
    return np.ascontiguousarray(img)


def to_grayscale(rgb) -> np.ndarray:
    """BT.601 luma, rounded half away from zero and clamped to [0, 255]."""
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise MalformedImage(f"expected an HxWx3 RGB array, got shape {rgb.shape}")
    r = rgb[..., 0].astype(np.float64)
    g = rgb[..., 1].astype(np.float64)
    b = rgb[..., 2].astype(np.float64)
    luma = np.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5)
    return np.clip(luma, 0, 255).astype(np.uint8)


def permute_rows(img: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Output row r is input row p[r]."""
    if len(p) != img.shape[0]:
        raise DimensionMismatch(f"permutation length {len(p)} != height {img.shape[0]}")
    return img[p]


def permute_cols(img: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Output column c is input column p[c]."""
    if len(p) != img.shape[1]:
        raise DimensionMismatch(f"permutation length {len(p)} != width {img.shape[1]}")
    return img[:, p]


def quantize_keystream(gammas) -> np.ndarray:
    """Eq. floor(mod(gamma * 1e14, 256)): real modulus first, then the floor."""
    gammas = np.asarray(gammas, dtype=np.float64)
    return np.floor(np.mod(gammas * KEYSTREAM_SCALE, 256.0)).astype(np.uint8)


def generate_keystream(key: KeyMaterial, n: int, burn_in: int) -> np.ndarray:
    """n keystream bytes from the NCA orbit after burn_in discarded steps.

    Iterates below KEYSTREAM_MIN_GAMMA are skipped (not quantized, not
    counted); the rule is deterministic so decryption regenerates the same
    bytes.
    """
    if n < 1:
        raise ParameterError(f"keystream length must be >= 1, got {n}")
    if burn_in < 0:
        raise ParameterError(f"burn_in must be >= 0, got {burn_in}")
    p = key.map_params
    alpha, beta = p.alpha_nca, p.beta_nca
    lam = maps.nca_coefficient(alpha, beta)
    x = key.x0_nca
    step = maps._nca_step
    for _ in range(burn_in):
        x = step(x, alpha, beta, lam)
    out = np.empty(n, dtype=np.uint8)
    fmod, floor = math.fmod, math.floor
    w = 0
    while w < n:
        x = step(x, alpha, beta, lam)
        if x >= KEYSTREAM_MIN_GAMMA:
            out[w] = floor(fmod(x * KEYSTREAM_SCALE, 256.0))
            w += 1
    return out


def xor_diffuse(img: np.ndarray, keystream: np.ndarray) -> np.ndarray:
    """Bitwise XOR with the keystream reshaped row-major to the image shape."""
    keystream = np.asarray(keystream, dtype=np.uint8)
    if keystream.size != img.size:
        raise LengthMismatch(
            f"keystream has {keystream.size} bytes for {img.size} pixels")
    return img ^ keystream.reshape(img.shape)


def _resolve_key(cfg: CipherConfig, plain_bytes: bytes) -> KeyMaterial:
    if cfg.key_mode == PLAINTEXT_HASH:
        return key_from_plaintext(plain_bytes, cfg.map_params)
    return key_from_user_secret(cfg.secret, cfg.map_params)


def encrypt_with_key(img: np.ndarray, key: KeyMaterial, burn_in: int) -> np.ndarray:
    """Run the pipeline on a validated image with explicit key material."""
    height, width = img.shape
    row_p = maps.permutation_from_sequence(
        maps.chaotic_sequence(maps.TDERCS, key, height, burn_in))
    col_p = maps.permutation_from_sequence(
        maps.chaotic_sequence(maps.NCA, key, width, burn_in))
    permuted = permute_cols(permute_rows(img, row_p), col_p)
    # Keystream continues the same NCA orbit past the column draws.
    ks = generate_keystream(key, height * width, burn_in + width)
    return sbox.substitute(xor_diffuse(permuted, ks))


def decrypt_with_key(body: np.ndarray, key: KeyMaterial, burn_in: int) -> np.ndarray:
    """Inverse pipeline: inverse S-box, XOR, inverse column then row permutation."""
    height, width = body.shape
    row_p = maps.permutation_from_sequence(
        maps.chaotic_sequence(maps.TDERCS, key, height, burn_in))
    col_p = maps.permutation_from_sequence(
        maps.chaotic_sequence(maps.NCA, key, width, burn_in))
    ks = generate_keystream(key, height * width, burn_in + width)
    permuted = xor_diffuse(sbox.substitute_inverse(body), ks)
    unpermuted = permute_cols(permuted, maps.invert_permutation(col_p))
    return permute_rows(unpermuted, maps.invert_permutation(row_p))


def _make_envelope(cipher: np.ndarray, key: KeyMaterial, cfg: CipherConfig,
                   payload_kind: int, trailing_pad: int, sample_rate: int) -> CipherEnvelope:
    if cfg.key_mode == PLAINTEXT_HASH:
        kappa_hex = f"{key.kappa1:012x}{key.kappa2:012x}"
    else:
        kappa_hex = ""
    height, width = cipher.shape
    return CipherEnvelope(
        key_mode=cfg.key_mode,
        payload_kind=payload_kind,
        width=width,
        height=height,
        trailing_pad=trailing_pad,
        sample_rate=sample_rate,
        burn_in=cfg.burn_in,
        map_params=cfg.map_params,
        kappa_hex=kappa_hex,
        body=cipher.tobytes(),
    )


def encrypt_image(img, cfg: CipherConfig = None) -> CipherEnvelope:
    """Encrypt a grayscale image into an envelope."""
    cfg = cfg or CipherConfig()
    img = validate_image(img)
    key = _resolve_key(cfg, img.tobytes())
    cipher = encrypt_with_key(img, key, cfg.burn_in)
    return _make_envelope(cipher, key, cfg, PAYLOAD_IMAGE, 0, 0)


def _key_for_envelope(env: CipherEnvelope, secret: bytes | None) -> KeyMaterial:
    if env.key_mode == PLAINTEXT_HASH:
        if len(env.kappa_hex) != 24:
            raise KeyUnavailable("plaintext-hash envelope is missing its kappa field")
        return key_from_kappas(int(env.kappa_hex[:12], 16),
                               int(env.kappa_hex[12:], 16), env.map_params)
    if secret is None:
        raise KeyUnavailable("user-secret envelope needs the secret to decrypt")
    return key_from_user_secret(secret, env.map_params)


def decrypt_image(env: CipherEnvelope, secret: bytes | None = None) -> np.ndarray:
    """Recover the exact pre-encryption pixel matrix from an envelope."""
    if len(env.body) != env.width * env.height:
        raise LengthMismatch(
            f"body is {len(env.body)} bytes, expected {env.width * env.height}")
    key = _key_for_envelope(env, secret)
    body = np.frombuffer(env.body, dtype=np.uint8).reshape(env.height, env.width)
    return decrypt_with_key(body, key, env.burn_in)


def _audio_matrix_shape(nbytes: int) -> tuple:
    rows = max(2, int(math.isqrt(nbytes)))
    cols = max(2, -(-nbytes // rows))  # ceil division
    return rows, cols


def encrypt_audio(samples, cfg: CipherConfig = None, sample_rate: int = 0) -> CipherEnvelope:
    """Encrypt 16-bit PCM frames: little-endian bytes shaped into a matrix.

    The byte stream is zero-padded to fill an r x c matrix with
    r = max(2, floor(sqrt(n))); the pad length travels in the header and is
    stripped on decryption.
    """
    cfg = cfg or CipherConfig()
    samples = np.asarray(samples, dtype="<i2")
    if samples.ndim != 1 or samples.size < 1:
        raise MalformedImage("expected a nonempty 1-D array of 16-bit frames")
    raw = samples.tobytes()
    rows, cols = _audio_matrix_shape(len(raw))
    pad = rows * cols - len(raw)
    matrix = np.frombuffer(raw + b"\x00" * pad, dtype=np.uint8).reshape(rows, cols)
    key = _resolve_key(cfg, matrix.tobytes())
    cipher = encrypt_with_key(matrix, key, cfg.burn_in)
    return _make_envelope(cipher, key, cfg, PAYLOAD_AUDIO, pad, sample_rate)


def decrypt_audio(env: CipherEnvelope, secret: bytes | None = None):
    """Recover (samples, sample_rate) from an audio envelope."""
    matrix = decrypt_image(env, secret)
    raw = matrix.tobytes()
    if env.trailing_pad:
        raw = raw[:-env.trailing_pad]
    return np.frombuffer(raw, dtype="<i2"), env.sample_rate
