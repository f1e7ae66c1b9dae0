#pragma once

#include "beckmann.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "moser.hpp"
#include "path_measures.hpp"
#include "regularize.hpp"
#include "render.hpp"
#include "scenarios.hpp"
