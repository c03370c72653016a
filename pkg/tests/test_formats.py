"""ASCII PGM and CSV grid formats: round trips and error positions."""

import numpy as np
import pytest

from segloss.formats import (
    FormatError,
    load_probabilities,
    parse_grid,
    parse_mask,
    parse_nonneg_grid,
    parse_prob_grid,
    serialize_grid,
    serialize_mask,
    write_text_atomic,
)


class TestPgm:
    def test_spec_example(self):
        mask = parse_mask("P2\n2 2\n255\n255 0 0 255")
        assert np.array_equal(mask, [[1.0, 0.0], [0.0, 1.0]])

    def test_round_trip_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            mask = (rng.random((5, 7)) < 0.5).astype(float)
            assert np.array_equal(parse_mask(serialize_mask(mask)), mask)

    def test_comments_skipped(self):
        text = "P2  # ascii mask\n# full-line comment\n2 1\n255\n255 0\n"
        assert np.array_equal(parse_mask(text), [[1.0, 0.0]])

    def test_threshold_at_127(self):
        mask = parse_mask("P2\n2 1\n255\n127 128")
        assert np.array_equal(mask, [[0.0, 1.0]])

    def test_bad_magic(self):
        with pytest.raises(FormatError, match="magic"):
            parse_mask("P5\n2 2\n255\n1 2 3 4")

    def test_pixel_count_mismatch(self):
        with pytest.raises(FormatError, match="dimension mismatch"):
            parse_mask("P2\n2 2\n255\n255 0 0")

    def test_non_numeric_token_names_position(self):
        with pytest.raises(FormatError, match=r"line 4, column 5"):
            parse_mask("P2\n2 2\n255\n255 abc 0 255")

    def test_out_of_range_pixel(self):
        with pytest.raises(FormatError, match="out of range"):
            parse_mask("P2\n2 1\n255\n300 0")

    def test_unsupported_maxval(self):
        with pytest.raises(FormatError, match="maxval"):
            parse_mask("P2\n1 1\n65535\n40000")

    def test_truncated_header(self):
        with pytest.raises(FormatError, match="truncated"):
            parse_mask("P2\n2 2")


class TestCsvGrid:
    def test_two_by_two(self):
        grid = parse_grid("0.5,0.25\n1.0,0.0")
        assert np.array_equal(grid, [[0.5, 0.25], [1.0, 0.0]])

    def test_row_length_mismatch_names_row(self):
        with pytest.raises(FormatError, match="line 2"):
            parse_grid("0.5,0.25\n1.0\n")

    def test_non_numeric_cell_names_position(self):
        with pytest.raises(FormatError, match=r"line 2, column 2"):
            parse_grid("0.5,0.25\n1.0,oops\n")

    def test_non_finite_rejected(self):
        with pytest.raises(FormatError, match="non-finite"):
            parse_grid("inf,0.5\n")

    def test_empty_rejected(self):
        with pytest.raises(FormatError, match="empty"):
            parse_grid("\n\n")

    def test_probability_range_violation_names_position(self):
        with pytest.raises(FormatError, match=r"line 2, column 1"):
            parse_prob_grid("0.5,0.25\n1.5,0.0\n")

    def test_negative_distance_rejected(self):
        with pytest.raises(FormatError, match="negative"):
            parse_nonneg_grid("0.0,1.0\n-2.0,3.0\n")

    def test_seventeen_digit_round_trip_is_value_exact(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            grid = rng.random((6, 6)) * rng.choice([1e-9, 1.0, 1e9])
            again = parse_grid(serialize_grid(grid))
            assert np.array_equal(again, grid)


class TestLoadProbabilities:
    def test_dispatches_on_magic(self):
        assert np.array_equal(load_probabilities("P2\n1 1\n255\n255"), [[1.0]])
        assert np.array_equal(load_probabilities("0.25,0.75\n"), [[0.25, 0.75]])


class TestAtomicWrite:
    def test_writes_content(self, tmp_path):
        target = tmp_path / "out.csv"
        write_text_atomic(str(target), "a,b\n")
        assert target.read_text() == "a,b\n"

    def test_overwrites_existing(self, tmp_path):
        target = tmp_path / "out.csv"
        target.write_text("old")
        write_text_atomic(str(target), "new")
        assert target.read_text() == "new"
