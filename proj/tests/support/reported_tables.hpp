#pragma once

// (mean, std, Sharpe) triples of the published evaluation tables: always
// quoting, two-action and four-action market makers, every populated cell.

#include <array>

namespace rmm::testing {

struct ReportedCell {
    double mean;
    double std;
    double sharpe;
};

inline constexpr std::array<ReportedCell, 72> kReportedCells{{
    {66.77, 11.26, 5.93},
    {61.00, 4.12, 14.79},
    {54.57, 4.09, 13.35},
    {61.10, 4.07, 15.01},
    {54.55, 4.07, 13.39},
    {57.74, 3.49, 16.54},
    {29.97, 3.88, 7.72},
    {30.01, 3.84, 7.81},
    {36.10, 3.48, 10.37},
    {42.80, 4.36, 9.81},
    {42.90, 4.36, 9.85},
    {42.86, 4.32, 9.93},
    {59.87, 4.74, 12.62},
    {60.03, 4.07, 14.76},
    {61.57, 3.73, 16.52},
    {58.37, 4.10, 14.25},
    {56.07, 3.92, 14.30},
    {49.95, 3.40, 14.68},
    {53.13, 3.93, 13.53},
    {53.14, 3.89, 13.66},
    {51.03, 3.54, 14.41},
    {64.61, 4.44, 14.56},
    {59.64, 4.06, 14.70},
    {62.70, 3.88, 16.15},
    {66.85, 11.10, 6.02},
    {61.05, 4.13, 14.79},
    {54.52, 4.08, 13.35},
    {61.09, 4.07, 15.02},
    {54.56, 4.08, 13.38},
    {57.73, 3.47, 16.61},
    {30.03, 3.87, 7.75},
    {32.95, 4.21, 7.83},
    {36.07, 3.47, 10.39},
    {42.81, 4.36, 9.81},
    {42.82, 4.33, 9.88},
    {42.13, 4.22, 9.99},
    {59.97, 4.75, 12.64},
    {60.07, 4.05, 14.83},
    {61.62, 3.73, 16.52},
    {58.29, 4.06, 14.36},
    {56.01, 3.88, 14.42},
    {49.94, 3.39, 14.73},
    {56.69, 4.17, 13.59},
    {53.10, 3.89, 13.66},
    {51.02, 3.54, 14.41},
    {64.53, 4.38, 14.72},
    {59.67, 4.05, 14.73},
    {62.69, 3.88, 16.14},
    {65.85, 10.85, 6.07},
    {61.03, 4.11, 14.84},
    {52.83, 3.95, 13.39},
    {60.12, 4.00, 15.04},
    {54.51, 4.03, 13.52},
    {57.61, 3.46, 16.64},
    {30.00, 3.87, 7.75},
    {32.94, 4.21, 7.83},
    {36.13, 3.48, 10.39},
    {42.92, 4.29, 10.01},
    {45.66, 4.55, 10.03},
    {45.35, 4.35, 10.43},
    {59.95, 4.73, 12.66},
    {60.01, 4.04, 14.84},
    {61.63, 3.73, 16.51},
    {58.25, 4.05, 14.40},
    {56.03, 3.88, 14.43},
    {51.58, 3.48, 14.84},
    {64.72, 4.75, 13.63},
    {53.10, 3.89, 13.66},
    {51.18, 3.54, 14.46},
    {64.53, 4.36, 14.80},
    {59.64, 4.01, 14.87},
    {62.66, 3.87, 16.17},
}};

}  // namespace rmm::testing
