# Single-threaded BLAS is faster than threaded at the matrix sizes used
# here; must be set before numpy is first imported.
import os

os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
