DEFAULT_ROOT_CAP = 24
DEFAULT_NODE_CAP = 10**6
DEFAULT_EDGE_CAP = 25
DEFAULT_FFFO_BOUND = 8

ROOT_CAP_ENV = "RELBN_ROOT_CAP"
NODE_CAP_ENV = "RELBN_NODE_CAP"

DECIMAL_DIGITS = 12

ENGINE_NAMES = ["auto", "bruteforce", "positive-product", "qf-pruned", "dllite"]

# First match wins, most specific first.
FRAGMENT_PRIORITY = [
  "PropAnd", "PropOr", "PropAndNot", "DLLiteNF", "DLLiteNFWithPrimitiveNegation", "EL", "ALC",
  "QF", "FFFOk", "FFFO"
]

KEYWORDS = ["relation", "prob", "def", "forall", "exists", "true", "false", "gamma"]

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_GUARD = 2
EXIT_ZERO_EVIDENCE = 3
