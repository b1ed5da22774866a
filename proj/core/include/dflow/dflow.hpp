#pragma once

#include "dflow/comparator.hpp"
#include "dflow/engine.hpp"
#include "dflow/errors.hpp"
#include "dflow/handles.hpp"
#include "dflow/schedule_queue.hpp"
