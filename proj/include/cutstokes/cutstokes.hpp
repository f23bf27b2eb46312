#pragma once

#include "cutstokes/geometry.hpp"
#include "cutstokes/mesh.hpp"
#include "cutstokes/fe.hpp"
#include "cutstokes/space.hpp"
#include "cutstokes/assembly.hpp"
#include "cutstokes/system.hpp"
#include "cutstokes/manufactured.hpp"
#include "cutstokes/errors.hpp"
#include "cutstokes/studies.hpp"
#include "cutstokes/config.hpp"
#include "cutstokes/runner.hpp"
