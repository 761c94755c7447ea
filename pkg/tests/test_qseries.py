from fractions import Fraction

import pytest

from latvoa.qseries import (
    QSeries, SeriesError, euler_product, extract_multiplicities, partition_series,
    subspace_character, virasoro_character,
)


def test_arithmetic():
    a = QSeries([1, 1], truncation=4)
    b = QSeries([1, -1], truncation=4)
    assert (a * b).coeffs == [1, 0, -1, 0, 0]
    assert a + QSeries([0], truncation=4) == a
    assert partition_series(8).integer_coeffs() == [1, 1, 2, 3, 5, 7, 11, 15, 22]


def test_division_precondition():
    with pytest.raises(SeriesError):
        QSeries([1, 1]) / QSeries([0, 1])


def test_vacuum_character():
    ch = virasoro_character(0, 9)
    assert ch.integer_coeffs() == [1, 0, 1, 1, 2, 2, 4, 4, 7, 8]
    assert ch.offset == Fraction(-1, 24)
    # independent count: partitions into parts >= 2
    p = partition_series(9).integer_coeffs()
    assert ch.integer_coeffs() == [p[0]] + [p[n] - p[n - 1] for n in range(1, 10)]


def test_square_character():
    ch = virasoro_character(9, 12)
    assert ch[9] == 1 and ch[10] == 1 and ch[8] == 0
    assert euler_product(3).integer_coeffs() == [1, -1, -1, 0]


def test_extraction():
    assert extract_multiplicities(virasoro_character(9, 20)) == [(0, 0), (1, 0), (2, 0), (3, 1), (4, 0)]
    assert extract_multiplicities(virasoro_character(0, 10).scale(2))[0] == (0, 2)
    with pytest.raises(SeriesError):
        extract_multiplicities(QSeries([1, 0, 0], Fraction(-1, 24)))


def test_text():
    ch = subspace_character([1, 0, 1, 1, 2])
    assert ch.to_text() == "q^(-1/24)·(1 + q^2 + q^3 + 2q^4 + O(q^5))"
    assert subspace_character([1]).to_text() == "q^(-1/24)·(1 + O(q^1))"
