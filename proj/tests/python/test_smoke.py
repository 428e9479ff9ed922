import math
import os
import struct
import subprocess

import pytest

import pestego


def minimal_pe():
    """One-section PE32: e_lfanew 0x58, FileAlignment 0x200, slack 0x178..0x200."""
    b = bytearray(0x400)
    b[0:2] = b"MZ"
    struct.pack_into("<I", b, 0x3C, 0x58)
    b[0x58:0x5C] = b"PE\0\0"
    struct.pack_into("<HH", b, 0x5C, 0x14C, 1)
    struct.pack_into("<H", b, 0x6C, 0xE0)
    opt = 0x70
    struct.pack_into("<H", b, opt, 0x10B)
    struct.pack_into("<I", b, opt + 16, 0x1000)
    struct.pack_into("<I", b, opt + 28, 0x400000)
    struct.pack_into("<II", b, opt + 32, 0x1000, 0x200)
    struct.pack_into("<II", b, opt + 56, 0x2000, 0x200)
    sec = opt + 0xE0
    b[sec:sec + 5] = b".text"
    struct.pack_into("<IIII", b, sec + 8, 0x123, 0x1000, 0x200, 0x200)
    for i in range(0x123):
        b[0x200 + i] = (i * 7 + 1) & 0xFF | 1
    return bytes(b)


def test_parse_and_layout():
    img = pestego.parse_pe(minimal_pe())
    assert img.number_of_sections == 1
    assert img.header_end_offset == 0x178
    assert pestego.header_slack(img) == pestego.Region(0x178, 0x88)
    assert pestego.section_slack(img, 0) == pestego.Region(0x323, 0xDD)
    assert pestego.rva_to_file_offset(img, 0x1010) == 0x210
    assert pestego.rva_to_va(0x00400000, 0x1000) == 0x00401000
    assert img.serialize() == minimal_pe()


def test_errors_carry_codes():
    with pytest.raises(pestego.PestegoError) as exc:
        pestego.parse_pe(b"XX" + bytes(100))
    assert exc.value.code == "NotMz"
    with pytest.raises(pestego.PestegoError) as exc:
        pestego.rva_to_va(0xFFFFFFFF, 2)
    assert exc.value.code == "Overflow"


def test_hide_retract_and_compare():
    cover = minimal_pe()
    img = pestego.parse_pe(cover)
    assert pestego.capacity(img, "k.txt").usable == 117
    stego = pestego.hide(img, "p.bin", bytes(range(50)))
    assert pestego.retract(stego) == ("p.bin", bytes(range(50)))
    report = pestego.compare(cover, stego.serialize())
    assert report.diff_confined_to_slack
    assert report.identical_section_table
    assert "diff_confined_to_slack: true" in report.to_structured()
    with pytest.raises(pestego.PestegoError) as exc:
        pestego.hide(stego, "p.bin", b"x")
    assert exc.value.code == "SlackOccupied"
    assert pestego.validate_pe(cover) == []


def test_statistic_hand_values():
    st = pestego.statistic([1, 2, 3, 4], [1, 0, 1, 0])
    assert abs(st.q + 1 / math.sqrt(2)) < 1e-9
    marked = pestego.embed_bit([1, 2, 3, 4], [1, 0, 1, 0], 5, 1)
    assert marked == [6, 2, 8, 4]
    assert abs(pestego.statistic(marked, [1, 0, 1, 0]).q - 4 / math.sqrt(2)) < 1e-9
    assert abs(pestego.normal_quantile(0.95) - 1.6448536269514722) < 1e-12


def test_message_round_trip():
    import random

    rng = random.Random(1)
    pixels = bytes(rng.randint(120, 136) for _ in range(64 * 64))
    carrier = pestego.Carrier(64, 64, pixels)
    bits = [rng.randint(0, 1) for _ in range(64)]
    stego = pestego.embed_message(carrier, b"key", bits)
    got = pestego.extract_message(stego, b"key", 64, alpha=0.001)
    # 0-bit blocks still false-positive at rate alpha.
    assert sum(g == b for g, b in zip(got, bits)) >= 62
    assert all(g == 1 for g, b in zip(got, bits) if b == 1)
    assert pestego.embed_message(carrier, b"key", [0] * 64) == carrier
    assert pestego.read_pgm(pestego.write_pgm(stego)) == stego


@pytest.mark.skipif(not os.environ.get("PESTEGO_CLI"), reason="CLI path not provided")
def test_cli_inspect(tmp_path):
    exe = tmp_path / "a.exe"
    exe.write_bytes(minimal_pe())
    out = subprocess.run([os.environ["PESTEGO_CLI"], "inspect", "--in", str(exe)],
                         capture_output=True, text=True, check=True).stdout
    assert "header slack: 0x00000178 +136" in out
