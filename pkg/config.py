import os
from dotenv import load_dotenv

load_dotenv()
LOG_LEVEL = os.getenv("PERCEPTRON_LOG_LEVEL", "INFO")
DEFAULT_OUTPUT_DIR = os.getenv("PERCEPTRON_OUTPUT_DIR", "output")
DEFAULT_THREADS = int(os.getenv("PERCEPTRON_THREADS", "1"))

# Default operating point (dimensionless units, t0 = 1, hbar = 1)
KAPPA = 2000.0
OMEGA_F = 1.0
X_MAX = 12.0
DESIGN_Y = 12.0
EPSILON = 5e-5
N_TIME = 20_000
WORST_CASE_RATIO = 1.272

# Integrator tolerances
BETA_ATOL = 1e-10
BETA_RTOL = 1e-9
FAQUAD_RTOL = 1e-10
COT_THETA_CAP = 1e8
