# Services package for planck-lab