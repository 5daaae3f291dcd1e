"""Travel-document values and their canonical byte encoding.

Everything the other layers exchange (passports, pages, visa records,
image blobs, device state) is defined here as a value type with
construction-time validation, plus a deterministic tagged binary
encoding. The exact byte layout is documented in docs/encoding.md and
is covered by round-trip tests; any change to field order or framing is
a wire-format break.

Times and dates are plain integers: seconds since the scenario epoch.
They are rendered as ISO-8601 only when a report is written.
"""

from __future__ import annotations

import hashlib
import re
import struct
from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Callable, Collection, Iterable

from .errors import ValidationError

if TYPE_CHECKING:  # pragma: no cover - import cycle, type hints only
    from .authflow import Session

__all__ = [
    "IdKind",
    "PassportStatus",
    "PageContent",
    "StampKind",
    "VisaStatus",
    "TrackingId",
    "StampEntry",
    "PassportPage",
    "Passport",
    "VisaImage",
    "VisaRecord",
    "AuthImage",
    "DeviceState",
    "PassportSummary",
    "VisaPresentation",
    "content_hash",
    "new_tracking_id",
    "new_passport",
    "place_visa",
    "add_stamp",
    "summarize",
    "canonical_serialize",
    "canonical_deserialize",
    "register_codec",
]

TRACKING_ALPHABET = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
TRACKING_LENGTH = 12
PASSPORT_PAGE_COUNT = 32
AUTH_IMAGE_COUNT = 10

_TRACKING_RE = re.compile(r"^[A-Z0-9]{12}$")
_COUNTRY_RE = re.compile(r"^[A-Z]{2,3}$")
_AIRPORT_RE = re.compile(r"^[A-Z]{3}$")
_HEX64_RE = re.compile(r"^[0-9a-f]{64}$")


def content_hash(data: bytes) -> str:
    """SHA-256 of ``data`` as 64 lowercase hex characters."""
    return hashlib.sha256(data).hexdigest()


def _require(cond: bool, invariant: str, detail: str) -> None:
    if not cond:
        raise ValidationError(invariant, f"{invariant}: {detail}")


class IdKind(Enum):
    PASSPORT_APPLICATION = "PASSPORT_APPLICATION"
    VISA_APPLICATION = "VISA_APPLICATION"


class PassportStatus(Enum):
    ACTIVE = "ACTIVE"
    LOCKED = "LOCKED"
    EXPIRED = "EXPIRED"


class PageContent(Enum):
    EMPTY = "EMPTY"
    VISA_SLOT = "VISA_SLOT"
    STAMPS = "STAMPS"


class StampKind(Enum):
    ARRIVAL = "ARRIVAL"
    DEPARTURE = "DEPARTURE"


class VisaStatus(Enum):
    ISSUED = "ISSUED"
    REVOKED = "REVOKED"


@dataclass(frozen=True)
class TrackingId:
    """Application reference shown to the applicant while they wait."""

    value: str
    kind: IdKind

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        _require(bool(_TRACKING_RE.match(self.value)), "BAD_TRACKING_FORMAT",
                 f"tracking id must be 12 chars of A-Z0-9, got {self.value!r}")
        _require(isinstance(self.kind, IdKind), "BAD_TRACKING_KIND", repr(self.kind))


@dataclass(frozen=True)
class StampEntry:
    kind: StampKind
    airport: str
    stamped_at: int

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        _require(isinstance(self.kind, StampKind), "BAD_STAMP_KIND", repr(self.kind))
        _require(bool(_AIRPORT_RE.match(self.airport)), "BAD_AIRPORT_CODE",
                 f"airport must be 3 uppercase letters, got {self.airport!r}")
        _require(self.stamped_at >= 0, "NEGATIVE_TIMESTAMP", str(self.stamped_at))


@dataclass(frozen=True)
class PassportPage:
    """One page. A page holding a visa slot also carries that visa's stamps."""

    page_no: int
    visa_id: str | None = None
    stamps: tuple[StampEntry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "stamps", tuple(self.stamps))
        self.validate()

    @property
    def content(self) -> PageContent:
        if self.visa_id is not None:
            return PageContent.VISA_SLOT
        if self.stamps:
            return PageContent.STAMPS
        return PageContent.EMPTY

    def validate(self) -> None:
        _require(self.page_no >= 1, "BAD_PAGE_NUMBER", str(self.page_no))
        _require(self.visa_id is None or self.visa_id != "", "EMPTY_VISA_ID", "")
        times = [s.stamped_at for s in self.stamps]
        _require(times == sorted(times), "STAMP_OUT_OF_ORDER",
                 f"page {self.page_no} stamps must be non-decreasing")


@dataclass(frozen=True)
class Passport:
    passport_no: str
    holder_name: str
    nationality: str
    issuing_authority: str
    issue_date: int
    expiry_date: int
    pages: tuple[PassportPage, ...]
    bound_device: str | None
    status: PassportStatus

    def __post_init__(self):
        object.__setattr__(self, "pages", tuple(self.pages))
        self.validate()

    def validate(self) -> None:
        _require(bool(self.passport_no), "EMPTY_PASSPORT_NO", "")
        _require(bool(self.holder_name), "EMPTY_HOLDER_NAME", "")
        _require(bool(_COUNTRY_RE.match(self.nationality)), "BAD_COUNTRY_CODE",
                 repr(self.nationality))
        _require(bool(_COUNTRY_RE.match(self.issuing_authority)), "BAD_COUNTRY_CODE",
                 repr(self.issuing_authority))
        _require(self.expiry_date > self.issue_date, "EXPIRY_NOT_AFTER_ISSUE",
                 f"issue {self.issue_date} expiry {self.expiry_date}")
        numbers = [p.page_no for p in self.pages]
        _require(numbers == list(range(1, len(self.pages) + 1)), "PAGES_NOT_CONTIGUOUS",
                 f"page numbers {numbers[:5]}...")
        slots = [p.visa_id for p in self.pages if p.visa_id is not None]
        _require(len(slots) == len(set(slots)), "DUPLICATE_VISA_SLOT", repr(slots))
        _require(self.bound_device is None or self.bound_device != "",
                 "EMPTY_DEVICE_ID", "")
        _require(isinstance(self.status, PassportStatus), "BAD_STATUS", repr(self.status))

    def page(self, page_no: int) -> PassportPage:
        if not 1 <= page_no <= len(self.pages):
            raise ValidationError("NO_SUCH_PAGE", f"page {page_no} of {len(self.pages)}")
        return self.pages[page_no - 1]

    def all_stamps(self) -> list[StampEntry]:
        return [s for p in self.pages for s in p.stamps]


@dataclass(frozen=True)
class VisaImage:
    """Opaque image blob; the hash is always recomputable from the bytes."""

    data: bytes
    media_type: str
    content_hash: str

    def __post_init__(self):
        self.validate()

    @classmethod
    def of(cls, data: bytes, media_type: str = "image/png") -> "VisaImage":
        return cls(bytes(data), media_type, content_hash(bytes(data)))

    def validate(self) -> None:
        _require(bool(self.media_type), "EMPTY_MEDIA_TYPE", "")
        _require(bool(_HEX64_RE.match(self.content_hash)), "BAD_HASH_FORMAT",
                 repr(self.content_hash))
        _require(self.content_hash == content_hash(self.data), "HASH_MISMATCH",
                 "stored hash does not match image bytes")


@dataclass(frozen=True)
class VisaRecord:
    visa_id: str
    passport_no: str
    issuing_country: str
    destination_country: str
    valid_from: int
    valid_to: int
    image_hash: str
    status: VisaStatus

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        _require(bool(self.visa_id), "EMPTY_VISA_ID", "")
        _require(bool(self.passport_no), "EMPTY_PASSPORT_NO", "")
        _require(bool(_COUNTRY_RE.match(self.issuing_country)), "BAD_COUNTRY_CODE",
                 repr(self.issuing_country))
        _require(bool(_COUNTRY_RE.match(self.destination_country)), "BAD_COUNTRY_CODE",
                 repr(self.destination_country))
        _require(self.valid_to > self.valid_from, "VISA_WINDOW_EMPTY",
                 f"from {self.valid_from} to {self.valid_to}")
        _require(bool(_HEX64_RE.match(self.image_hash)), "BAD_HASH_FORMAT",
                 repr(self.image_hash))
        _require(isinstance(self.status, VisaStatus), "BAD_STATUS", repr(self.status))


@dataclass(frozen=True)
class AuthImage:
    """One of the ten enrolled challenge pictures. Fixed for the device's life."""

    index: int
    image_hash: str
    answer_hash: str

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        _require(0 <= self.index < AUTH_IMAGE_COUNT, "BAD_IMAGE_INDEX", str(self.index))
        _require(bool(_HEX64_RE.match(self.image_hash)), "BAD_HASH_FORMAT",
                 repr(self.image_hash))
        _require(bool(_HEX64_RE.match(self.answer_hash)), "BAD_HASH_FORMAT",
                 repr(self.answer_hash))


class DeviceState:
    """A traveler's phone: the installed passport, downloaded visas, and
    the active session. Owned and mutated by exactly one caller at a time;
    everything it holds is an immutable value that can be shared freely.

    A locked device refuses every operation except reading its fields.
    """

    __slots__ = ("device_id", "clock_offset_min", "locked", "passport",
                 "visas", "auth_images", "session")

    def __init__(self, device_id: str, clock_offset_min: int = 0,
                 auth_images: Iterable[AuthImage] = (),
                 passport: Passport | None = None):
        self.device_id = device_id
        self.clock_offset_min = clock_offset_min
        self.locked = False
        self.passport = passport
        self.visas: dict[str, VisaImage] = {}
        self.auth_images: tuple[AuthImage, ...] = tuple(auth_images)
        self.session: "Session | None" = None
        self.validate()

    def validate(self) -> None:
        _require(bool(self.device_id), "EMPTY_DEVICE_ID", "")
        _require(-1440 <= self.clock_offset_min <= 1440, "BAD_CLOCK_OFFSET",
                 str(self.clock_offset_min))
        _require(len(self.auth_images) == AUTH_IMAGE_COUNT, "BAD_AUTH_IMAGE_SET",
                 f"need exactly {AUTH_IMAGE_COUNT} images, got {len(self.auth_images)}")
        indices = [img.index for img in self.auth_images]
        _require(indices == list(range(AUTH_IMAGE_COUNT)), "BAD_AUTH_IMAGE_SET",
                 f"indices must be 0..{AUTH_IMAGE_COUNT - 1} in order, got {indices}")
        if self.passport is not None:
            for page in self.passport.pages:
                if page.visa_id is not None:
                    _require(page.visa_id in self.visas, "VISA_NOT_DOWNLOADED",
                             f"page {page.page_no} references {page.visa_id!r}")

    def displayed_minutes(self, now: int) -> int:
        """Minutes past midnight shown on the device at scenario time ``now``."""
        return (now // 60 + self.clock_offset_min) % 1440

    def displayed_time(self, now: int) -> str:
        minutes = self.displayed_minutes(now)
        return f"{minutes // 60:02d}:{minutes % 60:02d}"

    def place_visa(self, visa_id: str, page_no: int) -> Passport:
        if self.passport is None:
            raise ValidationError("NO_PASSPORT", "no passport installed")
        self.passport = place_visa(self.passport, visa_id, page_no, self.visas)
        return self.passport


@dataclass(frozen=True)
class PassportSummary:
    """What the desk reader sees during a check; no page detail."""

    passport_no: str
    holder_name: str
    nationality: str
    issuing_authority: str
    issue_date: int
    expiry_date: int
    status: PassportStatus

    def validate(self) -> None:
        _require(bool(self.passport_no), "EMPTY_PASSPORT_NO", "")
        _require(bool(self.holder_name), "EMPTY_HOLDER_NAME", "")


@dataclass(frozen=True)
class VisaPresentation:
    """Body of a check response: summary, chosen visa, and its image."""

    passport: PassportSummary
    visa_id: str
    image: VisaImage

    def validate(self) -> None:
        self.passport.validate()
        _require(bool(self.visa_id), "EMPTY_VISA_ID", "")
        self.image.validate()


# ---------------------------------------------------------------------------
# Operations


def new_tracking_id(kind: IdKind, rng, issued: Collection[str] = frozenset()) -> TrackingId:
    """Draw a fresh 12-char tracking id, retrying internally on collision."""
    while True:
        value = "".join(rng.choice(TRACKING_ALPHABET) for _ in range(TRACKING_LENGTH))
        if value not in issued:
            return TrackingId(value, kind)


def new_passport(passport_no: str, holder_name: str, nationality: str,
                 issuing_authority: str, issue_date: int, expiry_date: int,
                 page_count: int = PASSPORT_PAGE_COUNT) -> Passport:
    """A freshly issued passport: fixed page count, all pages empty, unbound."""
    pages = tuple(PassportPage(n) for n in range(1, page_count + 1))
    return Passport(passport_no, holder_name, nationality, issuing_authority,
                    issue_date, expiry_date, pages, None, PassportStatus.ACTIVE)


def place_visa(passport: Passport, visa_id: str, page_no: int,
               downloaded: Collection[str]) -> Passport:
    """Put a downloaded visa onto an empty page; returns the new passport."""
    if visa_id not in downloaded:
        raise ValidationError("VISA_NOT_DOWNLOADED", f"{visa_id!r} not on device")
    page = passport.page(page_no)
    for p in passport.pages:
        if p.visa_id == visa_id:
            raise ValidationError("ALREADY_PLACED",
                                  f"{visa_id!r} already on page {p.page_no}")
    if page.content is not PageContent.EMPTY:
        raise ValidationError("PAGE_OCCUPIED",
                              f"page {page_no} is {page.content.value}")
    pages = list(passport.pages)
    pages[page_no - 1] = replace(page, visa_id=visa_id)
    return replace(passport, pages=tuple(pages))


def add_stamp(passport: Passport, page_no: int, stamp: StampEntry) -> Passport:
    """Append a stamp to a page. Stamp times never go backwards within
    one passport, regardless of which page they land on."""
    page = passport.page(page_no)
    history = passport.all_stamps()
    if history and stamp.stamped_at < max(s.stamped_at for s in history):
        raise ValidationError("STAMP_OUT_OF_ORDER",
                              f"{stamp.stamped_at} is before an existing stamp")
    pages = list(passport.pages)
    pages[page_no - 1] = replace(page, stamps=page.stamps + (stamp,))
    return replace(passport, pages=tuple(pages))


def summarize(passport: Passport) -> PassportSummary:
    return PassportSummary(passport.passport_no, passport.holder_name,
                           passport.nationality, passport.issuing_authority,
                           passport.issue_date, passport.expiry_date,
                           passport.status)


# ---------------------------------------------------------------------------
# Canonical encoding
#
# Layout per record: one tag byte, a 4-byte big-endian body length, then the
# fields in declaration order. Primitives: i64 = 8-byte big-endian two's
# complement; str/bytes = 4-byte big-endian length + payload (str is UTF-8);
# bool = 1 byte; enums = their member name as str; optional = presence byte
# then the value; lists = 4-byte count + elements; maps = 4-byte count +
# key-sorted (key, value) pairs. See docs/encoding.md.


class _Writer:
    __slots__ = ("buf",)

    def __init__(self):
        self.buf = bytearray()

    def u8(self, v: int) -> None:
        self.buf.append(v)

    def u32(self, v: int) -> None:
        self.buf += v.to_bytes(4, "big")

    def i64(self, v: int) -> None:
        self.buf += struct.pack(">q", v)

    def boolean(self, v: bool) -> None:
        self.buf.append(1 if v else 0)

    def raw(self, v: bytes) -> None:
        self.u32(len(v))
        self.buf += v

    def text(self, v: str) -> None:
        self.raw(v.encode("utf-8"))

    def enum(self, v: Enum) -> None:
        self.text(v.name)

    def opt(self, v, write: Callable) -> None:
        if v is None:
            self.u8(0)
        else:
            self.u8(1)
            write(v)


class _Reader:
    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise ValidationError("TRUNCATED_ENCODING",
                                  f"need {n} bytes at offset {self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def u8(self) -> int:
        return self.take(1)[0]

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def i64(self) -> int:
        return struct.unpack(">q", self.take(8))[0]

    def boolean(self) -> bool:
        v = self.u8()
        if v not in (0, 1):
            raise ValidationError("BAD_BOOL_BYTE", str(v))
        return v == 1

    def raw(self) -> bytes:
        return bytes(self.take(self.u32()))

    def text(self) -> str:
        return self.raw().decode("utf-8")

    def enum(self, cls):
        name = self.text()
        try:
            return cls[name]
        except KeyError:
            raise ValidationError("BAD_ENUM_NAME", f"{cls.__name__}.{name}") from None

    def opt(self, read: Callable):
        flag = self.u8()
        if flag == 0:
            return None
        if flag != 1:
            raise ValidationError("BAD_OPTION_BYTE", str(flag))
        return read()


_CODEC_BY_TYPE: dict[type, tuple[int, Callable, Callable]] = {}
_CODEC_BY_TAG: dict[int, tuple[type, Callable, Callable]] = {}


def register_codec(cls: type, tag: int, write_body: Callable, read_body: Callable) -> None:
    """Hook a record type into the canonical encoder; tags must be unique."""
    if tag in _CODEC_BY_TAG or cls in _CODEC_BY_TYPE:
        raise ValueError(f"codec already registered: {cls.__name__} / {tag:#x}")
    _CODEC_BY_TYPE[cls] = (tag, write_body, read_body)
    _CODEC_BY_TAG[tag] = (cls, write_body, read_body)


def _write_record(w: _Writer, record) -> None:
    try:
        tag, write_body, _ = _CODEC_BY_TYPE[type(record)]
    except KeyError:
        raise ValidationError("NO_CODEC", type(record).__name__) from None
    if hasattr(record, "validate"):
        record.validate()
    body = _Writer()
    write_body(body, record)
    w.u8(tag)
    w.u32(len(body.buf))
    w.buf += body.buf


def _read_record(r: _Reader, expected: type | None = None):
    tag = r.u8()
    try:
        cls, _, read_body = _CODEC_BY_TAG[tag]
    except KeyError:
        raise ValidationError("UNKNOWN_TAG", f"{tag:#x}") from None
    if expected is not None and cls is not expected:
        raise ValidationError("WRONG_RECORD_TYPE",
                              f"expected {expected.__name__}, got {cls.__name__}")
    length = r.u32()
    start = r.pos
    record = read_body(r)
    if r.pos - start != length:
        raise ValidationError("BAD_BODY_LENGTH",
                              f"declared {length}, consumed {r.pos - start}")
    return record


def canonical_serialize(record) -> bytes:
    """Encode one record to its canonical bytes (injective, deterministic)."""
    w = _Writer()
    _write_record(w, record)
    return bytes(w.buf)


def canonical_deserialize(data: bytes):
    """Inverse of canonical_serialize; rejects trailing or truncated bytes."""
    r = _Reader(data)
    record = _read_record(r)
    if r.pos != len(data):
        raise ValidationError("TRAILING_BYTES", f"{len(data) - r.pos} bytes left")
    return record


# -- per-type bodies, fields strictly in declaration order ------------------


def _tracking_w(w: _Writer, t: TrackingId) -> None:
    w.text(t.value)
    w.enum(t.kind)


def _tracking_r(r: _Reader) -> TrackingId:
    return TrackingId(r.text(), r.enum(IdKind))


def _stamp_w(w: _Writer, s: StampEntry) -> None:
    w.enum(s.kind)
    w.text(s.airport)
    w.i64(s.stamped_at)


def _stamp_r(r: _Reader) -> StampEntry:
    return StampEntry(r.enum(StampKind), r.text(), r.i64())


def _page_w(w: _Writer, p: PassportPage) -> None:
    w.i64(p.page_no)
    w.opt(p.visa_id, w.text)
    w.u32(len(p.stamps))
    for s in p.stamps:
        _write_record(w, s)


def _page_r(r: _Reader) -> PassportPage:
    page_no = r.i64()
    visa_id = r.opt(r.text)
    stamps = tuple(_read_record(r, StampEntry) for _ in range(r.u32()))
    return PassportPage(page_no, visa_id, stamps)


def _passport_w(w: _Writer, p: Passport) -> None:
    w.text(p.passport_no)
    w.text(p.holder_name)
    w.text(p.nationality)
    w.text(p.issuing_authority)
    w.i64(p.issue_date)
    w.i64(p.expiry_date)
    w.u32(len(p.pages))
    for page in p.pages:
        _write_record(w, page)
    w.opt(p.bound_device, w.text)
    w.enum(p.status)


def _passport_r(r: _Reader) -> Passport:
    return Passport(
        r.text(), r.text(), r.text(), r.text(), r.i64(), r.i64(),
        tuple(_read_record(r, PassportPage) for _ in range(r.u32())),
        r.opt(r.text), r.enum(PassportStatus))


def _visa_image_w(w: _Writer, v: VisaImage) -> None:
    w.raw(v.data)
    w.text(v.media_type)
    w.text(v.content_hash)


def _visa_image_r(r: _Reader) -> VisaImage:
    return VisaImage(r.raw(), r.text(), r.text())


def _visa_record_w(w: _Writer, v: VisaRecord) -> None:
    w.text(v.visa_id)
    w.text(v.passport_no)
    w.text(v.issuing_country)
    w.text(v.destination_country)
    w.i64(v.valid_from)
    w.i64(v.valid_to)
    w.text(v.image_hash)
    w.enum(v.status)


def _visa_record_r(r: _Reader) -> VisaRecord:
    return VisaRecord(r.text(), r.text(), r.text(), r.text(),
                      r.i64(), r.i64(), r.text(), r.enum(VisaStatus))


def _auth_image_w(w: _Writer, a: AuthImage) -> None:
    w.i64(a.index)
    w.text(a.image_hash)
    w.text(a.answer_hash)


def _auth_image_r(r: _Reader) -> AuthImage:
    return AuthImage(r.i64(), r.text(), r.text())


def _device_w(w: _Writer, d: DeviceState) -> None:
    w.text(d.device_id)
    w.i64(d.clock_offset_min)
    w.boolean(d.locked)
    w.opt(d.passport, lambda p: _write_record(w, p))
    w.u32(len(d.visas))
    for key in sorted(d.visas):
        w.text(key)
        _write_record(w, d.visas[key])
    w.u32(len(d.auth_images))
    for img in d.auth_images:
        _write_record(w, img)
    w.opt(d.session, lambda s: _write_record(w, s))


def _device_r(r: _Reader) -> DeviceState:
    device_id = r.text()
    offset = r.i64()
    locked = r.boolean()
    passport = r.opt(lambda: _read_record(r, Passport))
    visas = {}
    for _ in range(r.u32()):
        key = r.text()
        visas[key] = _read_record(r, VisaImage)
    images = tuple(_read_record(r, AuthImage) for _ in range(r.u32()))
    session = r.opt(lambda: _read_record(r))
    device = DeviceState(device_id, offset, images)
    device.locked = locked
    device.passport = passport
    device.visas = visas
    device.session = session
    device.validate()
    return device


def _summary_w(w: _Writer, s: PassportSummary) -> None:
    w.text(s.passport_no)
    w.text(s.holder_name)
    w.text(s.nationality)
    w.text(s.issuing_authority)
    w.i64(s.issue_date)
    w.i64(s.expiry_date)
    w.enum(s.status)


def _summary_r(r: _Reader) -> PassportSummary:
    return PassportSummary(r.text(), r.text(), r.text(), r.text(),
                           r.i64(), r.i64(), r.enum(PassportStatus))


def _presentation_w(w: _Writer, p: VisaPresentation) -> None:
    _write_record(w, p.passport)
    w.text(p.visa_id)
    _write_record(w, p.image)


def _presentation_r(r: _Reader) -> VisaPresentation:
    return VisaPresentation(_read_record(r, PassportSummary), r.text(),
                            _read_record(r, VisaImage))


register_codec(TrackingId, 0x01, _tracking_w, _tracking_r)
register_codec(StampEntry, 0x02, _stamp_w, _stamp_r)
register_codec(PassportPage, 0x03, _page_w, _page_r)
register_codec(Passport, 0x04, _passport_w, _passport_r)
register_codec(VisaImage, 0x05, _visa_image_w, _visa_image_r)
register_codec(VisaRecord, 0x06, _visa_record_w, _visa_record_r)
register_codec(AuthImage, 0x07, _auth_image_w, _auth_image_r)
register_codec(DeviceState, 0x08, _device_w, _device_r)
register_codec(PassportSummary, 0x09, _summary_w, _summary_r)
register_codec(VisaPresentation, 0x0A, _presentation_w, _presentation_r)
