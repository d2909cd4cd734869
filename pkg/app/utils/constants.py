SUCCESS = "success"
ERROR = "error"

# "is a real scalar" checks on algebra elements
SCALAR_TOL = 1e-10
# basis-level algebra invariants of loaded tables
TABLE_TOL = 1e-12

DEFAULT_SEED = 42
DEFAULT_PV_EPSILONS = [0.4, 0.2, 0.1, 0.05]
DEFAULT_BOUNDARY_Q = 16
DEFAULT_VOLUME_Q = 12
DEFAULT_MC_SAMPLES = 20000

# rows of batched node arrays handed to integrands at a time
NODE_BATCH = 1 << 15

# inflation factors used by the inhomogeneous solver and the Hartogs cutoff
SUPPORT_INFLATION = 0.10
CUTOFF_PLATEAU = 1.10
CUTOFF_SUPPORT = 1.40

SUBSPACE_PRESETS = ["H-CJ", "H-reduced", "H-full", "O-full", "Cl02-paravec", "Cl03-paravec"]

# volume rule for the one-variable integrals of the Hartogs construction
HARTOGS_Q = 16
HARTOGS_PANELS = 8
