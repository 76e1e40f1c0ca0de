"""Tests for names and packets"""
import pytest

from drrmdpf.consts import DATA, INTEREST
from drrmdpf.errors import MalformedName, UsageError
from drrmdpf.packet import Packet, content_class_of, is_prefix, make_data, make_interest, parse_name


def test_parse_name():
    assert parse_name("/") == ()
    assert parse_name("/c3/o17") == ("c3", "o17")


@pytest.mark.parametrize("name", ["", "c3/o1", "/c3//o1", "/c3/"])
def test_parse_name_rejects_malformed(name):
    with pytest.raises(MalformedName):
        parse_name(name)


def test_content_class_is_first_component():
    assert content_class_of("/c3/o17") == "c3"

    with pytest.raises(MalformedName):
        content_class_of("/")


def test_is_prefix_is_component_wise():
    assert is_prefix("/", "/c1/o2")
    assert is_prefix("/c1", "/c1/o2")
    assert not is_prefix("/c1", "/c10/o2")
    assert not is_prefix("/c1/o2/x", "/c1/o2")


def test_packets():
    interest = make_interest("/c1/o2", size=64, now=1.5)
    data = make_data("/c1/o2", size=1024, now=2.0)

    assert interest.is_interest and interest.kind == INTEREST
    assert not data.is_interest and data.kind == DATA
    assert interest.bits == 512
    assert data.content_class == "c1"
    assert interest.created_at == 1.5


def test_packet_validation():
    with pytest.raises(UsageError):
        Packet(name="/c1/o1", kind="nack", size=10)

    with pytest.raises(UsageError):
        Packet(name="/c1/o1", kind=DATA, size=0)
