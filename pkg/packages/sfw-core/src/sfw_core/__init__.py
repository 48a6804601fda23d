"""Core tensors, pixel groups, distortion balls, and linear-algebra kernels."""
