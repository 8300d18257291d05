#pragma once

#include <array>

namespace molu::bench {

/// Published activation outputs for integer inputs -7..8, columns GeLU,
/// SiLU (Swish), Mish, ELU(alpha=1), MoLU(alpha=2, beta=2). The Mish entry at
/// x = -3 is printed with a truncated exponent in the source and is stored
/// here as -1.45647461e-01.
inline constexpr int kTable1FirstInput = -7;
inline constexpr std::size_t kTable1Rows = 16;
inline constexpr std::size_t kTable1Cols = 5;

inline constexpr std::array<std::array<double, kTable1Cols>, kTable1Rows> kTable1 = {{
    {-2.33146835e-15, -6.37735836e-03, -6.38026341e-03, -9.99088118e-01, -1.16414021e-05},
    {-8.43964898e-11, -1.48357389e-02, -1.48540805e-02, -9.97521248e-01, -7.37305482e-05},
    {-2.29179620e-07, -3.34642546e-02, -3.35762377e-02, -9.93262053e-01, -4.53999296e-04},
    {-7.02459482e-05, -7.19448398e-02, -7.25917408e-02, -9.81684361e-01, -2.68370062e-03},
    {-3.63739208e-03, -1.42277620e-01, -1.45647461e-01, -9.50212932e-01, -1.48723912e-02},
    {-4.54023059e-02, -2.38405844e-01, -2.52501483e-01, -8.64664717e-01, -7.32298040e-02},
    {-1.58808009e-01, -2.68941421e-01, -3.03401461e-01, -6.32120559e-01, -2.64248689e-01},
    {0.0, 0.0, 0.0, 0.0, 0.0},
    {8.41191991e-01, 7.31058579e-01, 8.65098388e-01, 1.00000000, 1.00000000},
    {1.95459769, 1.76159416, 1.94395896, 2.00000000, 2.00000000},
    {2.99636261, 2.85772238, 2.98653500, 3.00000000, 3.00000000},
    {3.99992975, 3.92805516, 3.99741281, 4.00000000, 4.00000000},
    {4.99999977, 4.96653575, 4.99955208, 5.00000000, 5.00000000},
    {6.00000000, 5.98516426, 5.99992663, 6.00000000, 6.00000000},
    {7.00000000, 6.99362264, 6.99998838, 7.00000000, 7.00000000},
    {8.00000000, 7.99731720, 7.99999820, 8.00000000, 8.00000000},
}};

}  // namespace molu::bench
