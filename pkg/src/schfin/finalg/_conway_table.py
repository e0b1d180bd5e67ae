"""Compatible tower polynomials (coefficients low degree first)."""

CONWAY = {
    2: {
        1: (1, 1),
        2: (1, 1, 1),
        3: (1, 1, 0, 1),
        4: (1, 1, 0, 0, 1),
        5: (1, 0, 1, 0, 0, 1),
        6: (1, 1, 0, 1, 1, 0, 1),
        7: (1, 1, 0, 0, 0, 0, 0, 1),
        8: (1, 0, 1, 1, 1, 0, 0, 0, 1),
        9: (1, 0, 0, 0, 1, 0, 0, 0, 0, 1),
        10: (1, 1, 1, 1, 0, 1, 1, 0, 0, 0, 1),
        11: (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
        12: (1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1),
    },
    3: {
        1: (1, 1),
        2: (2, 2, 1),
        3: (1, 2, 0, 1),
        4: (2, 0, 0, 2, 1),
        5: (1, 2, 0, 0, 0, 1),
        6: (2, 2, 1, 0, 2, 0, 1),
        7: (1, 0, 2, 0, 0, 0, 0, 1),
        8: (2, 2, 2, 0, 1, 2, 0, 0, 1),
        9: (1, 1, 2, 2, 0, 0, 0, 0, 0, 1),
        10: (2, 1, 0, 0, 2, 2, 2, 0, 0, 0, 1),
        11: (1, 0, 2, 0, 0, 0, 0, 0, 0, 0, 0, 1),
        12: (2, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 0, 1),
    },
    5: {
        1: (3, 1),
        2: (2, 4, 1),
        3: (3, 3, 0, 1),
        4: (2, 4, 4, 0, 1),
        5: (3, 4, 0, 0, 0, 1),
        6: (2, 0, 1, 4, 1, 0, 1),
        7: (3, 3, 0, 0, 0, 0, 0, 1),
        8: (2, 4, 3, 0, 1, 0, 0, 0, 1),
    },
    7: {
        1: (4, 1),
        2: (3, 6, 1),
        3: (4, 0, 6, 1),
        4: (3, 4, 5, 0, 1),
        5: (4, 1, 0, 0, 0, 1),
        6: (3, 6, 4, 5, 1, 0, 1),
    },
}
