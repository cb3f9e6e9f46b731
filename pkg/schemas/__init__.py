# Schemas package for planck-lab