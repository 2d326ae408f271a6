from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

# -ffp-contract=off keeps the kernel's float arithmetic identical to the
# numpy fallback: fused multiply-adds would change the last-ulp rounding of
# the dot products and break bit-for-bit backend equality.
extensions = [
    Extension(
        "singletsim._kernel",
        ["src/singletsim/_kernel.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

if cythonize is not None:
    setup(ext_modules=cythonize(extensions, language_level=3))
else:
    # Without Cython the package installs pure-Python; the numpy backend
    # is selected automatically at import time.
    setup()
