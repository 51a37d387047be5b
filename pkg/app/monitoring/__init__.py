# namespace for monitoring utilities
