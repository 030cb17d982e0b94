#ifndef MAGHOP_SRC_GAUSS_HPP
#define MAGHOP_SRC_GAUSS_HPP

// 16-point Gauss-Legendre rule on [-1, 1], shared by the quadrature routines.
namespace maghop::gauss {

constexpr int kN = 16;
constexpr double kX[kN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
    -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
    -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
    0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,
    0.9894009349916499};
constexpr double kW[kN] = {
    0.0271524594117540, 0.0622535239386477, 0.0951585116824926,
    0.1246289712555340, 0.1495959888165768, 0.1691565193950026,
    0.1826034150449236, 0.1894506104550686, 0.1894506104550686,
    0.1826034150449236, 0.1691565193950026, 0.1495959888165768,
    0.1246289712555340, 0.0951585116824926, 0.0622535239386477,
    0.0271524594117540};

} // namespace maghop::gauss

#endif
