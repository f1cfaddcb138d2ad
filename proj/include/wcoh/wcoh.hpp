#ifndef WCOH_WCOH_HPP
#define WCOH_WCOH_HPP

#include "coherence.hpp"
#include "cwt.hpp"
#include "denoise.hpp"
#include "error.hpp"
#include "fft.hpp"
#include "filter_bank.hpp"
#include "grid.hpp"
#include "grid_io.hpp"
#include "linalg.hpp"
#include "pipeline.hpp"
#include "timeseries.hpp"
#include "varma.hpp"
#include "wavelet_packet.hpp"

#endif // WCOH_WCOH_HPP
