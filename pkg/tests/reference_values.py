"""Frozen reference constants for the test suite.

All values were computed independently of the package by
scripts/recompute_reference_values.py (mpmath at 50 significant digits)
and pasted here verbatim. Rerun that script to audit them; nothing in
this file is derived from package code.

The shared instance behind most constants: alpha = beta = t = 1, F = 0,
w = 0, phi = 3, price = e (so z = 1), with sigma = 0 for the ZERO_VOL_*
block and sigma = 0.2 (y = 0.01) for the OU_* block.
"""

# sigma = 0: exact schedule of the no-noise solver
ZERO_VOL_P_STAR = 1.57369724899313725432676379265
ZERO_VOL_ZETA_STAR = 0.573697248993137254326763792652
ZERO_VOL_Q_STAR = 0.852605502013725491346472414695
ZERO_VOL_LAMBDA_STAR = 0.24019534456783492394207096834
ZERO_VOL_VALUE = 2.80132955017230793266134508307

# sigma = 0.2: full mean-reverting solve of the same instance
OU_LAMBDA_STAR = 0.238588724212108389917534508698
OU_P_STAR = 1.55867151898021697403316196636
OU_Q_STAR = 0.85826449939843524248258478058
OU_XI_INT = 0.576985971443052181589753852435
OU_ZETA0 = 0.592742861577707375172886664
OU_VALUE = 2.80599964889366574149447199356

# w = 0, phi = 0.5, s = 10, alpha = 1: sell-everything-now block value
SMALL_HOLDINGS_VALUE = 3.93469340287366576396200465009

# L(z) at beta = t = 1
L_ROOT = 3.31417964459109218812389243159
L_AT_0 = -0.632120558828557678404476229839
ABS_L_100_MINUS_1 = 1.96732484492319613867768830432e-20

# phi = 0 round trip at z = 10, alpha = beta = t = 1, y = 0.01, s = e^10
ROUND_TRIP_LAMBDA_Z10 = 336.541540335549535733753037321
ROUND_TRIP_BOUND_Z10 = 21412.3511645811516341897830215
ROUND_TRIP_WEAK_BOUND_Z10 = 20245.8757650169687182261092086
