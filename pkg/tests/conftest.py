"""Shared fixtures: the conformance corpus drawn from the published query pairs."""

from __future__ import annotations

import pytest

# Fig 1-style log: a string-literal filter change and a TOP-5 toggle.
Q1 = "SELECT * FROM Sales WHERE Country = 'US'"
Q2 = "SELECT * FROM Sales WHERE Country = 'UK'"
Q3 = "SELECT TOP 5 * FROM Sales"
Q4 = "SELECT * FROM Sales"

# Projection shrink / table swap examples.
Q5 = "SELECT region, revenue FROM clients"
Q6 = "SELECT revenue FROM clients"
Q7 = "SELECT * FROM Clients"
Q8 = "SELECT * FROM Regions"

# Tableau-trace style pair: quoted identifiers, aggregate aliases, GROUP BY
# ordinal, parenthesized HAVING conjuncts, only the upper bound differs.
Q9 = (
    'SELECT "ontime"."distance" AS "distance", '
    'SUM("ontime"."arrdelay") AS "sum:arrdelay:ok", '
    'SUM("ontime"."depdelay") AS "sum:depdelay:ok" '
    'FROM "public"."ontime" "ontime" '
    'GROUP BY 1 '
    'HAVING (MIN("ontime"."distance") >= 30.99) '
    'AND (MIN("ontime"."distance") <= 4983.00)'
)
Q10 = Q9.replace("4983.00", "2863.00")

CORPUS = [Q1, Q2, Q3, Q4, Q5, Q6, Q7, Q8, Q9, Q10]


@pytest.fixture(scope="session")
def corpus() -> list[str]:
    return list(CORPUS)
