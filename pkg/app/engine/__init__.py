# Computation engine
