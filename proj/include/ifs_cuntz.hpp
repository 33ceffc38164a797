#pragma once

#include "ifs_cuntz/coding_space.hpp"
#include "ifs_cuntz/cuntz_rep.hpp"
#include "ifs_cuntz/hilbert.hpp"
#include "ifs_cuntz/l2_realization.hpp"
#include "ifs_cuntz/measures.hpp"
#include "ifs_cuntz/serialization.hpp"
