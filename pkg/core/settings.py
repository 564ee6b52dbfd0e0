import os

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _env_int(key: str, default: int) -> int:
    return int(os.getenv(key, str(default)))


def _env_flag(key: str, default: bool) -> bool:
    return os.getenv(key, "1" if default else "0").strip().lower() in ("1", "true", "yes", "on")


WORKDIR = os.getenv("TOPOCHOICE_WORKDIR", "workdir")
LOG_LEVEL = os.getenv("TOPOCHOICE_LOG_LEVEL", "WARNING")
DEFAULT_SEED = _env_int("TOPOCHOICE_SEED", 0)

# degree
WINDING_SAMPLES = _env_int("TOPOCHOICE_WINDING_SAMPLES", 256)
WINDING_MAX_DEPTH = _env_int("TOPOCHOICE_WINDING_MAX_DEPTH", 20)
ICOSPHERE_LEVEL = _env_int("TOPOCHOICE_ICOSPHERE_LEVEL", 5)
SIMPLICIAL_TARGETS = _env_int("TOPOCHOICE_SIMPLICIAL_TARGETS", 3)

# antipode search
MULTISTARTS = _env_int("TOPOCHOICE_MULTISTARTS", 8)
ANTIPODE_MAX_ITER = _env_int("TOPOCHOICE_ANTIPODE_MAX_ITER", 200)

# witness search
SEARCH_NET_SIZE = _env_int("TOPOCHOICE_SEARCH_NET_SIZE", 16)
REFINE_STEPS = _env_int("TOPOCHOICE_REFINE_STEPS", 40)
SEARCH_RESTARTS = _env_int("TOPOCHOICE_SEARCH_RESTARTS", 4)

# Off by default so that identical CLI invocations write identical bytes
REPORT_WALL_TIME = _env_flag("TOPOCHOICE_REPORT_WALL_TIME", False)
