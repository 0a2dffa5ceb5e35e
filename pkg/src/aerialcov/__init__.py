"""Coverage analysis and trajectory planning for aerial users served by a
hybrid network of terrestrial and road-deployed dedicated base stations."""

__version__ = "0.1.0"

from .config import NetworkConfig, load_config, urban_defaults  # noqa: F401
from .channel import BsKind, LinkKind  # noqa: F401
