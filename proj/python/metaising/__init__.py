from ._metaising import *  # noqa: F401,F403
from ._metaising import __doc__  # noqa: F401
