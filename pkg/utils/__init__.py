# Utils package for planck-lab