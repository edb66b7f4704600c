"""Small hand-written instances used across the test suite and demos.

Each fixture is a function returning a fresh instance, so callers can never
mutate shared state.
"""

from __future__ import annotations

from flatsplit.extensions import ApartmentType, TypedApartmentMarket
from flatsplit.model import Instance


def mirrored_two() -> Instance:
    """Two players, two apartments with mirrored values.

    Player 0 values both rooms of apartment 0 at 200 and both rooms of
    apartment 1 at 100; player 1 is the mirror image.  Rents are 300 each.
    The instance is normalized (each player totals 600 = total rent).
    """
    return Instance.build(
        values=[
            [[200, 200], [100, 100]],
            [[100, 100], [200, 200]],
        ],
        rents=[300, 300],
        normalized=True,
    )


def dominant_two() -> Instance:
    """Two players, two apartments; each player cares about one apartment.

    Player 0 values apartment 0's rooms at 100 and apartment 1's at 0;
    player 1 values apartment 0's rooms at 1 and apartment 1's at 99.
    Rents are 100 each.
    """
    return Instance.build(
        values=[
            [[100, 100], [0, 0]],
            [[1, 1], [99, 99]],
        ],
        rents=[100, 100],
        normalized=True,
    )


def trio_base() -> Instance:
    """Three players, one apartment with rent 300.

    The unique maximin envy-free split prices every room at 100 and gives
    every player utility 50.
    """
    return Instance.build(
        values=[
            [[150, 150, 0]],
            [[0, 150, 150]],
            [[75, 75, 150]],
        ],
        rents=[300],
    )


def trio_tempting_column() -> list[list[int]]:
    """Second apartment that drags the trio's maximin value below 50.

    Column format matches ``Instance.values``: one row of room values per
    player."""
    return [
        [100, 100, 100],
        [300, 0, 0],
        [300, 0, 0],
    ]


def trio_distinct_favorites_column() -> list[list[int]]:
    """Second apartment where each player values a distinct room at the
    full rent; adding it lifts the maximin value to 200."""
    return [
        [300, 0, 0],
        [0, 300, 0],
        [0, 0, 300],
    ]


def trio_both() -> Instance:
    """`trio_base` extended with the tempting second apartment."""
    base = trio_base()
    extra = trio_tempting_column()
    values = [
        [list(base.values[i][0]), extra[i]]
        for i in range(3)
    ]
    return Instance.build(values=values, rents=[300, 300])


def trio_with_distinct_favorites() -> Instance:
    """`trio_base` extended with the distinct-favorites apartment."""
    base = trio_base()
    extra = trio_distinct_favorites_column()
    values = [
        [list(base.values[i][0]), extra[i]]
        for i in range(3)
    ]
    return Instance.build(values=values, rents=[300, 300])


def market_three_types() -> TypedApartmentMarket:
    """Splittable market with an empty core.

    Three players, three apartment types (sizes 3, 2, 1), all rent 0.
    Pairs do better in the two-room type than any full coalition can do
    overall, so no utility vector satisfies every coalition.
    """
    return TypedApartmentMarket.build(
        n=3,
        types=[
            ApartmentType.build(rent=0, room_values=[[340, 340, 340], [-20, -20, -20], [-20, -20, -20]]),
            ApartmentType.build(rent=0, room_values=[[170, 170], [170, 170], [170, 170]]),
            ApartmentType.build(rent=0, room_values=[[-1360], [-280], [-280]]),
        ],
    )
