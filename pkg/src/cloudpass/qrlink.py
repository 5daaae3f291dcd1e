"""QR payload segmentation and signed download tokens.

A payload is split into segments, each in one of four modes (numeric,
alphanumeric, byte, kanji), and mixing modes within one code is allowed.
``encode_payload`` picks the segmentation with the fewest total bits by
dynamic programming over split points and modes; the per-segment bit
costs use the version 1-9 count-indicator widths.

Download links are MAC-style tokens: the authority signs the token's
canonical bytes with its secret, and resolution checks the signature
before looking the resource up. Payloads are signed but readable; there
is no encryption at this layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import hashlib

from .errors import QrError, ValidationError
from .model import _Writer, canonical_deserialize, canonical_serialize, register_codec

__all__ = [
    "QrMode",
    "QrSegment",
    "QrPayload",
    "ResourceKind",
    "LinkToken",
    "classify_mode",
    "segment_cost",
    "encode_payload",
    "decode_payload",
    "mint_link_token",
    "resolve_link_token",
    "token_wire",
    "token_from_wire",
    "token_to_payload",
    "token_from_payload",
]

MODE_INDICATOR_BITS = 4

ALNUM_BYTES = frozenset(b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:")

# Valid double-byte values, big-endian, for kanji segments.
_KANJI_RANGES = ((0x8140, 0x9FFC), (0xE040, 0xEBBF))


class QrMode(Enum):
    NUMERIC = "NUM"
    ALPHANUMERIC = "ALNUM"
    BYTE = "BYTE"
    KANJI = "KANJI"


# Count-indicator widths for symbol versions 1 through 9.
COUNT_INDICATOR_BITS = {
    QrMode.NUMERIC: 10,
    QrMode.ALPHANUMERIC: 9,
    QrMode.BYTE: 8,
    QrMode.KANJI: 8,
}

_TEXT_MODE_NAMES = {m.value: m for m in QrMode}


def _is_numeric(data: bytes) -> bool:
    return all(0x30 <= b <= 0x39 for b in data)


def _is_alnum(data: bytes) -> bool:
    return all(b in ALNUM_BYTES for b in data)


def _pair_ok(hi: int, lo: int) -> bool:
    value = hi << 8 | lo
    return any(low <= value <= high for low, high in _KANJI_RANGES)


def _is_kanji(data: bytes) -> bool:
    if not data or len(data) % 2:
        return False
    return all(_pair_ok(data[i], data[i + 1]) for i in range(0, len(data), 2))


def _char_count(mode: QrMode, data: bytes) -> int:
    return len(data) // 2 if mode is QrMode.KANJI else len(data)


def _data_bits(mode: QrMode, chars: int) -> int:
    if mode is QrMode.NUMERIC:
        return 10 * (chars // 3) + (0, 4, 7)[chars % 3]
    if mode is QrMode.ALPHANUMERIC:
        return 11 * (chars // 2) + 6 * (chars % 2)
    if mode is QrMode.BYTE:
        return 8 * chars
    return 13 * chars


def _as_bytes(data) -> bytes:
    if isinstance(data, str):
        return data.encode("utf-8")
    return bytes(data)


@dataclass(frozen=True)
class QrSegment:
    mode: QrMode
    payload: bytes

    def __post_init__(self):
        object.__setattr__(self, "payload", bytes(self.payload))
        if not self.payload:
            raise QrError("EMPTY_INPUT", "segment payload is empty")
        ok = {
            QrMode.NUMERIC: _is_numeric,
            QrMode.ALPHANUMERIC: _is_alnum,
            QrMode.BYTE: lambda _: True,
            QrMode.KANJI: _is_kanji,
        }[self.mode](self.payload)
        if not ok:
            raise QrError("BAD_SEGMENT_CHAR",
                          f"payload not valid for {self.mode.name}")

    @property
    def char_count(self) -> int:
        return _char_count(self.mode, self.payload)


@dataclass(frozen=True)
class QrPayload:
    segments: tuple[QrSegment, ...]
    total_bits: int

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise QrError("EMPTY_INPUT", "payload has no segments")
        expected = sum(segment_cost(s) for s in self.segments)
        if self.total_bits != expected:
            raise QrError("BAD_BIT_TOTAL", f"{self.total_bits} != {expected}")

    def to_text(self) -> str:
        """Log-friendly form, e.g. ``ALNUM:CP-|NUM:2041``. Byte and kanji
        payloads are hex so every payload stays one printable token."""
        parts = []
        for seg in self.segments:
            if seg.mode in (QrMode.NUMERIC, QrMode.ALPHANUMERIC):
                parts.append(f"{seg.mode.value}:{seg.payload.decode('ascii')}")
            else:
                parts.append(f"{seg.mode.value}:{seg.payload.hex()}")
        return "|".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "QrPayload":
        segments = []
        for part in text.split("|"):
            name, sep, body = part.partition(":")
            if not sep or name not in _TEXT_MODE_NAMES:
                raise QrError("BAD_PAYLOAD_TEXT", repr(part))
            mode = _TEXT_MODE_NAMES[name]
            if mode in (QrMode.NUMERIC, QrMode.ALPHANUMERIC):
                payload = body.encode("ascii")
            else:
                try:
                    payload = bytes.fromhex(body)
                except ValueError:
                    raise QrError("BAD_PAYLOAD_TEXT", repr(part)) from None
            segments.append(QrSegment(mode, payload))
        return cls(tuple(segments), sum(segment_cost(s) for s in segments))


def classify_mode(data) -> QrMode:
    """Tightest single mode that admits every character of ``data``."""
    raw = _as_bytes(data)
    if not raw:
        raise QrError("EMPTY_INPUT")
    if _is_numeric(raw):
        return QrMode.NUMERIC
    if _is_alnum(raw):
        return QrMode.ALPHANUMERIC
    if _is_kanji(raw):
        return QrMode.KANJI
    return QrMode.BYTE


def segment_cost(segment: QrSegment) -> int:
    """Header (mode + count indicator) plus data bits for one segment."""
    return (MODE_INDICATOR_BITS + COUNT_INDICATOR_BITS[segment.mode]
            + _data_bits(segment.mode, segment.char_count))


def encode_payload(data) -> QrPayload:
    """Minimum-bit segmentation of ``data`` over all split points and modes."""
    raw = _as_bytes(data)
    n = len(raw)
    if n == 0:
        raise QrError("EMPTY_INPUT")

    numeric = [0x30 <= b <= 0x39 for b in raw]
    alnum = [b in ALNUM_BYTES for b in raw]
    # kanji_run[i]: length of the longest valid pair run starting at i.
    kanji_run = [0] * (n + 2)
    for i in range(n - 2, -1, -1):
        if _pair_ok(raw[i], raw[i + 1]):
            kanji_run[i] = kanji_run[i + 2] + 2

    inf = float("inf")
    best = [inf] * (n + 1)
    best[0] = 0
    parent: list[tuple[int, QrMode] | None] = [None] * (n + 1)
    for end in range(1, n + 1):
        all_num = True
        all_aln = True
        for start in range(end - 1, -1, -1):
            all_num = all_num and numeric[start]
            all_aln = all_aln and alnum[start]
            if best[start] is inf:
                continue
            length = end - start
            header_n = best[start] + MODE_INDICATOR_BITS
            if all_num:
                cost = header_n + 10 + _data_bits(QrMode.NUMERIC, length)
                if cost < best[end]:
                    best[end] = cost
                    parent[end] = (start, QrMode.NUMERIC)
            if all_aln:
                cost = header_n + 9 + _data_bits(QrMode.ALPHANUMERIC, length)
                if cost < best[end]:
                    best[end] = cost
                    parent[end] = (start, QrMode.ALPHANUMERIC)
            cost = header_n + 8 + 8 * length
            if cost < best[end]:
                best[end] = cost
                parent[end] = (start, QrMode.BYTE)
            if length % 2 == 0 and kanji_run[start] >= length:
                cost = header_n + 8 + 13 * (length // 2)
                if cost < best[end]:
                    best[end] = cost
                    parent[end] = (start, QrMode.KANJI)

    segments = []
    end = n
    while end > 0:
        start, mode = parent[end]
        segments.append(QrSegment(mode, raw[start:end]))
        end = start
    segments.reverse()
    return QrPayload(tuple(segments), int(best[n]))


def decode_payload(payload: QrPayload) -> bytes:
    """Concatenate the segment payloads back into the original bytes."""
    return b"".join(seg.payload for seg in payload.segments)


# ---------------------------------------------------------------------------
# Signed download tokens


class ResourceKind(Enum):
    PASSPORT_APP = "PASSPORT_APP"
    VISA_IMAGE = "VISA_IMAGE"


@dataclass(frozen=True)
class LinkToken:
    """Pointer to one downloadable resource, signed by its authority."""

    authority_id: str
    resource_kind: ResourceKind
    resource_id: str
    signature: str


def _signing_bytes(authority_id: str, kind: ResourceKind, resource_id: str) -> bytes:
    w = _Writer()
    w.text(authority_id)
    w.enum(kind)
    w.text(resource_id)
    return bytes(w.buf)


def _sign(authority_id: str, kind: ResourceKind, resource_id: str,
          secret: bytes) -> str:
    payload = _signing_bytes(authority_id, kind, resource_id) + secret
    return hashlib.sha256(payload).hexdigest()


def mint_link_token(authority, resource_kind: ResourceKind,
                    resource_id: str) -> LinkToken:
    """``authority`` needs ``authority_id`` and ``secret`` attributes."""
    return LinkToken(authority.authority_id, resource_kind, resource_id,
                     _sign(authority.authority_id, resource_kind, resource_id,
                           authority.secret))


def resolve_link_token(token: LinkToken, authority) -> str:
    """Verify the signature, then require the resource to exist."""
    expected = _sign(token.authority_id, token.resource_kind,
                     token.resource_id, authority.secret)
    if (token.authority_id != authority.authority_id
            or token.signature != expected):
        raise QrError("BAD_SIGNATURE")
    if not authority.has_resource(token.resource_kind, token.resource_id):
        raise QrError("UNKNOWN_RESOURCE", token.resource_id)
    return token.resource_id


def token_wire(token: LinkToken) -> str:
    """Canonical bytes, hex-encoded: what actually rides inside a QR code."""
    return canonical_serialize(token).hex()


def token_from_wire(wire: str) -> LinkToken:
    try:
        raw = bytes.fromhex(wire)
        token = canonical_deserialize(raw)
    except (ValueError, ValidationError):
        raise QrError("BAD_TOKEN_WIRE", repr(wire[:32])) from None
    if not isinstance(token, LinkToken):
        raise QrError("BAD_TOKEN_WIRE", type(token).__name__)
    return token


def token_to_payload(token: LinkToken) -> QrPayload:
    return encode_payload(token_wire(token))


def token_from_payload(payload: QrPayload) -> LinkToken:
    return token_from_wire(decode_payload(payload).decode("ascii"))


def _token_w(w, t: LinkToken) -> None:
    w.text(t.authority_id)
    w.enum(t.resource_kind)
    w.text(t.resource_id)
    w.text(t.signature)


def _token_r(r) -> LinkToken:
    return LinkToken(r.text(), r.enum(ResourceKind), r.text(), r.text())


register_codec(LinkToken, 0x30, _token_w, _token_r)
