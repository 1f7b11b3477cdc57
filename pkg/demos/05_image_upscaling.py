"""
Image upscaling
===============

Halve a 512x512 grayscale image and bring it back to full size with each
method, scoring by PSNR. Pass a PGM path to use your own image; otherwise
the scikit-image camera picture is used.
"""

import sys

from modrecon import bench
from modrecon.pgm import read_pgm

if len(sys.argv) > 1:
    image = read_pgm(sys.argv[1])
else:
    from skimage import data

    image = data.camera()

for method in bench.IMAGE_METHODS:
    _, score = bench.image_round_trip(image, method, iterations=2, modules=1)
    print(f"{method:>10}: {score:6.2f} dB")
