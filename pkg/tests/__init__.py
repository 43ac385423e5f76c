# Tests for cnct_accel
