#include "sof/fixtures.hpp"

#include "sof/errors.hpp"

namespace sof {

namespace {

sof_instance fig1() {
  network net;
  for (int sw : {0, 1, 9, 10, 11, 12, 13, 14}) net.add_node(sw, node_role::sw, 0.0);
  for (int vm : {2, 3, 4, 5, 15}) net.add_node(vm, node_role::vm, 1.0);
  net.add_edge(1, 3, 1.0);
  net.add_edge(3, 2, 3.0);
  net.add_edge(3, 12, 1.0);
  net.add_edge(12, 15, 1.0);
  net.add_edge(12, 10, 1.0);
  net.add_edge(2, 11, 20.0);
  net.add_edge(11, 13, 1.0);
  net.add_edge(13, 14, 1.0);
  net.add_edge(14, 9, 1.0);
  net.add_edge(0, 4, 1.0);
  net.add_edge(4, 5, 1.0);
  net.add_edge(5, 9, 3.0);
  return make_instance(std::move(net), {0, 1}, {9, 10}, 2);
}

sof_instance fig2() {
  network net;
  for (int sw : {0, 1, 8, 9, 10, 11}) net.add_node(sw, node_role::sw, 0.0);
  net.add_node(2, node_role::vm, 25.0);
  net.add_node(3, node_role::vm, 10.0);
  net.add_node(4, node_role::vm, 10.0);
  net.add_node(5, node_role::vm, 25.0);
  net.add_node(6, node_role::vm, 15.0);
  net.add_node(7, node_role::vm, 15.0);
  net.add_edge(1, 2, 3.0);
  net.add_edge(2, 4, 3.0);
  net.add_edge(4, 10, 3.0);
  net.add_edge(10, 6, 3.0);
  net.add_edge(6, 8, 4.0);
  net.add_edge(0, 3, 6.0);
  net.add_edge(3, 11, 3.0);
  net.add_edge(11, 5, 3.0);
  net.add_edge(5, 7, 2.0);
  net.add_edge(7, 9, 2.0);
  net.add_edge(1, 3, 6.0);
  net.add_edge(3, 4, 7.0);
  net.add_edge(4, 8, 7.0);
  net.add_edge(4, 9, 7.0);
  return make_instance(std::move(net), {0, 1}, {8, 9}, 2);
}

sof_instance fig3() {
  network net;
  for (int sw : {0, 1, 8, 9}) net.add_node(sw, node_role::sw, 0.0);
  for (int vm : {2, 3, 4, 5, 6, 7}) net.add_node(vm, node_role::vm, 1.0);
  net.add_edge(0, 3, 1.0);
  net.add_edge(1, 2, 1.0);
  net.add_edge(2, 4, 1.0);
  net.add_edge(2, 3, 2.0);
  net.add_edge(3, 5, 1.0);
  net.add_edge(5, 6, 10.0);
  net.add_edge(4, 6, 11.0);
  net.add_edge(4, 7, 3.0);
  net.add_edge(5, 7, 4.0);
  net.add_edge(6, 8, 8.0);
  net.add_edge(7, 9, 8.0);
  return make_instance(std::move(net), {1}, {8, 9}, 5);
}

}  // namespace

sof_instance load_fixture(const std::string& name) {
  if (name == "fig1") return fig1();
  if (name == "fig2") return fig2();
  if (name == "fig3") return fig3();
  throw input_error("unknown fixture '" + name + "'");
}

std::vector<std::string> fixture_names() { return {"fig1", "fig2", "fig3"}; }

}  // namespace sof
