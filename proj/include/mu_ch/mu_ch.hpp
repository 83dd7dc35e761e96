#pragma once

// Umbrella header for the numerical core and the run/IO layer.

#include "mu_ch/errors.hpp"
#include "mu_ch/fft.hpp"
#include "mu_ch/field.hpp"
#include "mu_ch/helmholtz.hpp"
#include "mu_ch/detector.hpp"
#include "mu_ch/dynamics.hpp"
#include "mu_ch/characteristics.hpp"
#include "mu_ch/certificates.hpp"
#include "mu_ch/viscous.hpp"
#include "mu_ch/exact.hpp"
#include "mu_ch/config.hpp"
#include "mu_ch/io.hpp"
#include "mu_ch/dispatch.hpp"
