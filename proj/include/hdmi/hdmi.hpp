#ifndef HDMI_HDMI_HPP
#define HDMI_HDMI_HPP

#include "hdmi/dataset.hpp"
#include "hdmi/error.hpp"
#include "hdmi/evaluation.hpp"
#include "hdmi/fft.hpp"
#include "hdmi/kde.hpp"
#include "hdmi/mi.hpp"
#include "hdmi/screening.hpp"
#include "hdmi/seed.hpp"
#include "hdmi/simulation.hpp"

#endif  // HDMI_HDMI_HPP
