from .types import *
from .graph import *
from .dp import *
from .nn import *
from .models import *
from .attacks import *
from .evaluation import *
