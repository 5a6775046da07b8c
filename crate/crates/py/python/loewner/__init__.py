from ._loewner import *  # noqa: F401,F403
from ._loewner import __doc__  # noqa: F401
