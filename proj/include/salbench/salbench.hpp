#pragma once

#include <salbench/bench.hpp>
#include <salbench/core.hpp>
#include <salbench/descriptor.hpp>
#include <salbench/evaluation/aggregate.hpp>
#include <salbench/evaluation/histogram.hpp>
#include <salbench/evaluation/human.hpp>
#include <salbench/evaluation/metrics.hpp>
#include <salbench/evaluation/wilcoxon.hpp>
#include <salbench/geometry.hpp>
#include <salbench/io/colormap.hpp>
#include <salbench/io/config.hpp>
#include <salbench/io/ground_truth_io.hpp>
#include <salbench/io/manifest.hpp>
#include <salbench/io/mesh_io.hpp>
#include <salbench/laplacian.hpp>
#include <salbench/models/baselines.hpp>
#include <salbench/models/cs.hpp>
#include <salbench/models/ls.hpp>
#include <salbench/models/ms.hpp>
#include <salbench/models/prepare.hpp>
#include <salbench/models/ps.hpp>
#include <salbench/neighbor_index.hpp>
#include <salbench/normals.hpp>
#include <salbench/random.hpp>
#include <salbench/saliency_map.hpp>
#include <salbench/scanner.hpp>
#include <salbench/synthetic.hpp>
#include <salbench/synthetic_dataset.hpp>
#include <salbench/triangulation.hpp>
