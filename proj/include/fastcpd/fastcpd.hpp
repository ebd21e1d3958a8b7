#pragma once

#include "fastcpd/correspondence.hpp"
#include "fastcpd/degradations.hpp"
#include "fastcpd/errors.hpp"
#include "fastcpd/kernel.hpp"
#include "fastcpd/metrics.hpp"
#include "fastcpd/pointset.hpp"
#include "fastcpd/registration.hpp"
#include "fastcpd/solvers.hpp"
#include "fastcpd/svg.hpp"
