import pytest
import weightscope
from weightscope.io import types

test_uint8 = weightscope.test.type_behavior_func(
    types.UInt8,

    (0,    b"\x00"),
    (1,    b"\x01"),
    (0xFF, b"\xFF"),

    static_size = 1,
    default     = 0,
)

test_uint32 = weightscope.test.type_behavior_func(
    types.UInt32,

    (1,          b"\x01\x00\x00\x00"),
    (0x01020304, b"\x04\x03\x02\x01"),

    static_size = 4,
    default     = 0,
)

test_uint64 = weightscope.test.type_behavior_func(
    types.UInt64,

    (8,     b"\x08\x00\x00\x00\x00\x00\x00\x00"),
    (2**63, b"\x00\x00\x00\x00\x00\x00\x00\x80"),

    static_size = 8,
    default     = 0,
)

def test_struct_out_of_data():
    with pytest.raises(weightscope.util.BufferOutOfDataError):
        types.UInt32.unpack(b"\x00\x00")

def test_types_not_instantiated():
    with pytest.raises(NotImplementedError):
        types.UInt8()

def test_raw_bytes():
    weightscope.test.type_behavior(
        types.RawBytes(3),

        (b"abc",       b"abc"),
        (b"\x00\x01\x02", b"\x00\x01\x02"),

        static_size = 3,
        default     = b"\x00\x00\x00",
    )

    with pytest.raises(ValueError, match="exactly 3 bytes"):
        types.RawBytes(3).pack(b"ab")

    with pytest.raises(weightscope.util.BufferOutOfDataError):
        types.RawBytes(3).unpack(b"ab")

def test_magic():
    weightscope.test.type_behavior(
        types.Magic(b"AB"),

        (b"AB", b"AB"),

        static_size = 2,
        default     = b"AB",
    )

    with pytest.raises(weightscope.util.ParseError, match="signature"):
        types.Magic(b"AB").unpack(b"AC")

def test_prefixed_string():
    prefixed = types.PrefixedString(types.UInt8)

    weightscope.test.type_behavior(
        prefixed,

        ("abc", b"\x03abc"),
        ("",    b"\x00"),

        ("\u200B", b"\x03\xE2\x80\x8B"),

        static_size = None,
        default     = "",
    )

    assert prefixed.__qualname__ == "PrefixedString(UInt8)"

    with pytest.raises(weightscope.util.BufferOutOfDataError):
        prefixed.unpack(b"\x03ab")

    with pytest.raises(weightscope.util.ParseError, match="utf-8"):
        prefixed.unpack(b"\x01\xFF")

def test_prefixed_string_padding():
    padded = types.PrefixedString(types.UInt8, pad_to=4)

    assert padded.pack("a")   == b"\x03a  "
    assert padded.pack("abc") == b"\x03abc"
    assert padded.pack("")    == b"\x03   "

def test_prefixed_json():
    header = types.PrefixedJSON(types.UInt8)

    weightscope.test.type_behavior(
        header,

        ({"a": 1},        b'\x07{"a":1}'),
        ({"b": [1, 2]},   b'\x0B{"b":[1,2]}'),

        static_size = None,
        default     = {},
    )

    with pytest.raises(weightscope.util.DuplicateTensorError, match="'a'"):
        header.unpack(b'\x0D{"a":1,"a":2}')

    with pytest.raises(weightscope.util.ParseError, match="not a JSON object"):
        header.unpack(b"\x02[]")

    with pytest.raises(weightscope.util.ParseError, match="not valid JSON"):
        header.unpack(b"\x01{")
