"""Reference data: the appliance life-test data set and published plan tables.

Table rows are ``(theta_A, theta_U, T, alpha, beta, gamma, t1, t2, n, etc)``
with ``C = 1`` and prior ``a = 1.25, b = 2.5``.
"""

APPLIANCE_LIFETIMES = (
    11, 35, 49, 170, 329, 381, 708, 958, 1062, 1167, 1594, 1925, 1990, 2223, 2327,
    2400, 2451, 2471, 2551, 2565, 2568, 2694, 2702, 2761, 2831, 3034, 3059, 3112,
    3214, 3478, 3504, 4329, 6367, 6976, 7846, 13403,
)

# Design inputs used with the appliance data.
CASE_STUDY_SPEC = dict(theta_A=3000.0, theta_U=600.0, T=2000.0, alpha=0.1, beta=0.2)

# Published plans for the appliance data: loss, c, gamma, n, t1, t2, estimate, ETC.
CASE_STUDY_PLANS = (
    ("sel", None, 9, 31, 2064, 2065, 2577.9286, 2405),
    ("linex", 0.5, 11, 27, 2156, 2157, 2883.2339, 2909),
)

TABLE_SEL = (
    (200, 100, 100, 0.05, 0.05, 26, 162.3926, 162.3957, 31, 123.4077),
    (200, 100, 100, 0.01, 0.05, 20, 74.7316, 74.7322, 23, 90.7417),
    (200, 100, 100, 0.01, 0.01, 25, 146.3421, 146.3394, 26, 125.6045),
    (500, 200, 50, 0.05, 0.05, 21, 313.5638, 313.5638, 26, 475.5810),
    (500, 200, 50, 0.01, 0.05, 22, 310.5940, 310.5948, 27, 480.9310),
    (500, 200, 50, 0.01, 0.01, 30, 225.7734, 225.7735, 32, 563.9248),
    (500, 200, 100, 0.05, 0.05, 26, 313.3180, 313.3188, 37, 509.9392),
    (500, 200, 100, 0.01, 0.05, 14, 311.1179, 311.1179, 19, 503.4323),
    (500, 200, 100, 0.01, 0.01, 24, 390.4518, 390.4526, 38, 566.6305),
    (3000, 1500, 1000, 0.05, 0.05, 16, 2005.3416, 2005.3425, 62, 475.5810),
    (3000, 1500, 1000, 0.01, 0.05, 10, 2000.6681, 2000.6682, 92, 480.9310),
    (3000, 1500, 1000, 0.01, 0.01, 15, 2022.5679, 2022.568, 72, 2684.0441),
)

TABLE_LINEX_POS = (
    (200, 100, 100, 0.05, 0.05, 21, 63.1133, 63.1134, 35, 127.2029),
    (200, 100, 100, 0.01, 0.05, 19, 56.3674, 56.3675, 50, 118.7482),
    (200, 100, 100, 0.01, 0.01, 28, 140.9731, 140.9733, 30, 143.1099),
    (500, 200, 50, 0.05, 0.05, 21, 367.4209, 367.421, 34, 557.9282),
    (500, 200, 50, 0.01, 0.05, 26, 361.9554, 361.9555, 32, 556.9578),
    (500, 200, 50, 0.01, 0.01, 28, 371.9294, 371.9295, 36, 595.2252),
    (500, 200, 100, 0.05, 0.05, 22, 367.4918, 367.4918, 39, 521.9267),
    (500, 200, 100, 0.01, 0.05, 27, 354.8226, 354.8229, 37, 513.5307),
    (500, 200, 100, 0.01, 0.01, 25, 364.1113, 364.1115, 36, 524.21),
    (3000, 1500, 1000, 0.05, 0.05, 15, 2473.6173, 2473.6174, 24, 3379.9555),
    (3000, 1500, 1000, 0.01, 0.05, 11, 2437.8132, 2437.8133, 33, 3161.2578),
    (3000, 1500, 1000, 0.01, 0.01, 6, 2428.6943, 2428.6944, 14, 3705.1855),
)

TABLE_LINEX_NEG = (
    (200, 100, 100, 0.05, 0.05, 28, 186.2786, 186.2793, 34, 228.1767),
    (200, 100, 100, 0.01, 0.05, 26, 178.3335, 178.3342, 29, 232.5816),
    (200, 100, 100, 0.01, 0.01, 23, 177.5453, 177.5455, 45, 220.3530),
    (500, 200, 50, 0.05, 0.05, 12, 400.025, 400.0248, 25, 627.7466),
    (500, 200, 50, 0.01, 0.05, 15, 396.9158, 396.9158, 26, 635.9504),
    (500, 200, 50, 0.01, 0.01, 14, 405.41, 405.4198, 26, 636.7619),
    (500, 200, 100, 0.05, 0.05, 18, 423.5114, 423.5116, 43, 600.3209),
    (500, 200, 100, 0.01, 0.05, 22, 405.5332, 405.5335, 38, 620.4932),
    (500, 200, 100, 0.01, 0.01, 24, 411.5643, 411.5644, 37, 623.4914),
    (3000, 1500, 1000, 0.05, 0.05, 19, 3783.5928, 3783.5929, 29, 3449.2903),
    (3000, 1500, 1000, 0.01, 0.05, 11, 2507.4709, 2507.471, 30, 3411.8618),
    (3000, 1500, 1000, 0.01, 0.01, 9, 2557.26, 2557.2699, 27, 3450.2116),
)

# theta_A, theta_U, T, alpha, beta, ETC(SEL), ETC(Linex c=0.5), ETC of the Type I censoring MLE plan.
TABLE_COMPARISON = (
    (200, 100, 100, 0.05, 0.25, 123.4077, 151.0479, 156.53),
    (3000, 1500, 1500, 0.05, 0.1, 1423.5748, 2256.9985, 2290.35),
)

# table id -> (loss kind, c, rows)
TABLES = {
    "1": ("sel", None, TABLE_SEL),
    "2": ("linex", 0.5, TABLE_LINEX_POS),
    "3": ("linex", -0.5, TABLE_LINEX_NEG),
}
