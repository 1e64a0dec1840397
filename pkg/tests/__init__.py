# excesslex tests
