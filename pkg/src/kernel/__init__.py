"""Memory kernels, convolution quadrature and coercivity checks."""
