"""River water surface elevation toolkit.

Thin Python face of the C++ core: FBEWMA filtering, chainage regression,
calibration metrics, dataset samples and the evaluation pipeline.
"""

from ._wsekit import *  # noqa: F401,F403
from ._wsekit import __version__, WsekitError  # noqa: F401
