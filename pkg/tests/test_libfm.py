import numpy as np
import pytest

from dataset.libfm import (
    SparseBatch,
    format_libfm_line,
    load_libfm_file,
    parse_libfm_line,
    save_libfm_file,
)
from errors import DataFormatError
from helpers import random_instance


class TestParseLibfmLine:
    def test_reads_label_and_entries(self):
        x = parse_libfm_line("1.0 0:1 5:1")
        assert x.label == 1.0
        assert x.entries == [(0, 1.0), (5, 1.0)]

    def test_single_entry(self):
        x = parse_libfm_line("0 3:0.5")
        assert x.label == 0.0
        assert x.entries == [(3, 0.5)]

    def test_duplicate_index_rejected(self):
        with pytest.raises(DataFormatError, match="duplicate index 2"):
            parse_libfm_line("1.0 2:1 2:1")

    def test_entries_are_sorted(self):
        assert parse_libfm_line("-1 9:2 4:1 7:0.5").indices == (4, 7, 9)

    def test_comment_is_ignored(self):
        assert parse_libfm_line("1 2:1 # clicked").entries == [(2, 1.0)]

    @pytest.mark.parametrize("text", ["1 3", "1 a:1", "1 3:x", "x 3:1", "1 :1", "1 -2:1", "   "])
    def test_malformed_lines(self, text):
        with pytest.raises(DataFormatError):
            parse_libfm_line(text)

    def test_error_carries_context(self):
        with pytest.raises(DataFormatError, match="train.libfm:7"):
            parse_libfm_line("1 3:oops", context="train.libfm:7")


class TestRoundTrip:
    def test_format_then_parse(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            x = random_instance(rng, 50, 8)
            assert parse_libfm_line(format_libfm_line(x)) == x

    def test_file_round_trip(self, tmp_path):
        rng = np.random.default_rng(4)
        data = [random_instance(rng, 30, 5) for _ in range(20)]
        path = tmp_path / "data.libfm"
        save_libfm_file(path, data)
        assert load_libfm_file(path) == data


class TestLoadFile:
    def test_skips_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "d.libfm"
        path.write_text("# header\n1 0:1 2:1\n\n0 1:1  # negative\n")
        data = load_libfm_file(path)
        assert [x.label for x in data] == [1.0, 0.0]

    def test_error_names_line(self, tmp_path):
        path = tmp_path / "d.libfm"
        path.write_text("1 0:1\n1 0:1 0:1\n")
        with pytest.raises(DataFormatError, match=r"d\.libfm:2: duplicate index 0"):
            load_libfm_file(path)


class TestSparseBatch:
    def test_packs_local_columns(self):
        data = [parse_libfm_line("1 3:2 7:1"), parse_libfm_line("0 7:0.5 9:1")]
        batch = SparseBatch.from_instances(data, 10)
        np.testing.assert_array_equal(batch.nodes, [3, 7, 9])
        np.testing.assert_array_equal(batch.X.toarray(), [[2, 1, 0], [0, 0.5, 1]])
        np.testing.assert_array_equal(batch.labels, [1.0, 0.0])
        assert len(batch) == 2

    def test_index_out_of_range_is_named(self):
        with pytest.raises(DataFormatError, match="feature index 12"):
            SparseBatch.from_instances([parse_libfm_line("1 12:1")], 10)
