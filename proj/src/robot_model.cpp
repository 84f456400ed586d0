#include "thermik/robot_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace thermik::dyn {

using nlohmann::json;

int RobotModel::link_index(const std::string& nm) const {
    for (size_t i = 0; i < links.size(); ++i)
        if (links[i].name == nm) return int(i);
    return -1;
}

int RobotModel::joint_index(const std::string& nm) const {
    for (size_t i = 0; i < joints.size(); ++i)
        if (joints[i].name == nm) return int(i);
    return -1;
}

int RobotModel::contact_index(const std::string& nm) const {
    for (size_t i = 0; i < contacts.size(); ++i)
        if (contacts[i].name == nm) return int(i);
    return -1;
}

int RobotModel::actuator_index(const std::string& id) const {
    for (size_t i = 0; i < actuators.size(); ++i)
        if (actuators[i].id == id) return int(i);
    return -1;
}

double RobotModel::total_mass() const {
    double m = 0.0;
    for (const auto& l : links) m += l.mass;
    return m;
}

Eigen::MatrixXd RobotModel::actuation_selector() const {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(m(), n());
    for (int k = 0; k < m(); ++k) s(k, actuated_dofs[k]) = 1.0;
    return s;
}

void RobotModel::dof_limits(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const {
    lo.setConstant(n(), -std::numeric_limits<double>::infinity());
    hi.setConstant(n(), std::numeric_limits<double>::infinity());
    for (const auto& j : joints) {
        if (j.type == JointType::FloatingBasePlanar) continue;
        for (int d = 0; d < j.dofs(); ++d) {
            lo(j.first_dof + d) = j.limit_lo(d);
            hi(j.first_dof + d) = j.limit_hi(d);
        }
    }
}

void RobotModel::validate() {
    auto fail = [](const std::string& msg) { throw SchemaError("model: " + msg); };

    if (links.empty()) fail("no links");
    std::set<std::string> names;
    for (const auto& l : links) {
        if (!names.insert(l.name).second) fail("duplicate link name '" + l.name + "'");
        if (!(l.mass > 0.0)) fail("link '" + l.name + "': mass must be positive");
        if (l.inertia < 0.0) fail("link '" + l.name + "': inertia must be non-negative");
    }
    names.clear();
    for (const auto& j : joints) {
        if (!names.insert(j.name).second) fail("duplicate joint name '" + j.name + "'");
        for (int d = 0; d < j.dofs() && j.type != JointType::FloatingBasePlanar; ++d)
            if (!(j.limit_lo(d) < j.limit_hi(d)))
                fail("joint '" + j.name + "': limits must satisfy lo < hi");
        if (j.type == JointType::ActuatedPair) {
            if (j.pair_offset.norm() < 1e-9)
                fail("joint '" + j.name + "': actuated-pair hinges need a nonzero offset");
            if (!(j.lever_pitch > 0.0) || !(j.lever_roll > 0.0))
                fail("joint '" + j.name + "': pair lever arms must be positive");
        }
    }

    // exactly one parent joint per link, floating base only at a root
    joint_of_link.assign(links.size(), -1);
    int floating = 0;
    for (size_t ji = 0; ji < joints.size(); ++ji) {
        const Joint& j = joints[ji];
        if (j.child_link < 0 || j.child_link >= int(links.size()))
            fail("joint '" + j.name + "': unknown child link");
        if (j.parent_link >= int(links.size()))
            fail("joint '" + j.name + "': unknown parent link");
        if (joint_of_link[j.child_link] != -1)
            fail("link '" + links[j.child_link].name +
                 "' has two parent joints ('" + joints[joint_of_link[j.child_link]].name +
                 "' and '" + j.name + "'): kinematic loop");
        joint_of_link[j.child_link] = int(ji);
        if (j.type == JointType::FloatingBasePlanar) {
            if (j.parent_link != -1) fail("joint '" + j.name + "': floating base must attach to world");
            ++floating;
        }
    }
    if (floating > 1) fail("more than one floating-base joint");
    floating_base = floating == 1;

    for (size_t li = 0; li < links.size(); ++li)
        if (joint_of_link[li] == -1)
            fail("link '" + links[li].name + "' is not attached by any joint");

    // reach every link from the world: detects cycles through parent chains
    joint_order.clear();
    std::vector<bool> placed(links.size(), false);
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t ji = 0; ji < joints.size(); ++ji) {
            const Joint& j = joints[ji];
            if (placed[j.child_link]) continue;
            if (j.parent_link == -1 || placed[j.parent_link]) {
                placed[j.child_link] = true;
                joint_order.push_back(int(ji));
                progress = true;
            }
        }
    }
    for (size_t li = 0; li < links.size(); ++li)
        if (!placed[li])
            fail("link '" + links[li].name + "' is unreachable from the world (loop or dangling)");

    // assign q layout: base DOFs first, then joints in declaration order
    int dof = floating_base ? 3 : 0;
    for (auto& j : joints) {
        if (j.type == JointType::FloatingBasePlanar) {
            j.first_dof = 0;
            continue;
        }
        j.first_dof = dof;
        dof += j.dofs();
    }
    dof_count = dof;

    // actuators
    names.clear();
    std::vector<std::set<int>> rods(joints.size());
    for (const auto& a : actuators) {
        if (!names.insert(a.id).second) fail("duplicate actuator id '" + a.id + "'");
        if (a.joint < 0 || a.joint >= int(joints.size()))
            fail("actuator '" + a.id + "': unknown joint");
        const Joint& j = joints[a.joint];
        if (j.type == JointType::FloatingBasePlanar)
            fail("actuator '" + a.id + "': floating base cannot be actuated");
        if (j.type == JointType::Revolute && a.map != EffortMapKind::Direct)
            fail("actuator '" + a.id + "': revolute joints use the direct map");
        if (j.type == JointType::ActuatedPair) {
            if (a.map != EffortMapKind::PushrodPair)
                fail("actuator '" + a.id + "': pair joints need the pushrod-pair map");
            if (a.rod != 0 && a.rod != 1) fail("actuator '" + a.id + "': rod must be 0 or 1");
            if (!rods[a.joint].insert(a.rod).second)
                fail("actuator '" + a.id + "': rod " + std::to_string(a.rod) +
                     " of joint '" + j.name + "' already bound");
        }
    }
    std::set<int> actuated_joints;
    for (const auto& a : actuators) actuated_joints.insert(a.joint);
    for (int ji : actuated_joints) {
        const Joint& j = joints[ji];
        if (j.type == JointType::ActuatedPair && rods[ji].size() != 2)
            fail("joint '" + j.name + "': pair joints need both pushrods bound");
    }
    actuated_dofs.clear();
    for (int ji : actuated_joints)
        for (int d = 0; d < joints[ji].dofs(); ++d)
            actuated_dofs.push_back(joints[ji].first_dof + d);
    std::sort(actuated_dofs.begin(), actuated_dofs.end());
    if (m() > n() - (floating_base ? 3 : 0))
        fail("more actuated DOFs than joint DOFs");

    // contact frames
    names.clear();
    for (const auto& c : contacts) {
        if (!names.insert(c.name).second) fail("duplicate contact frame '" + c.name + "'");
        if (c.link < 0 || c.link >= int(links.size()))
            fail("contact frame '" + c.name + "': unknown link");
    }
}

namespace {

Eigen::Vector2d vec2_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw SchemaError(where + ": expected a [x, z] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

RobotModel model_from_json(const std::string& text, const std::string& where) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(where + ": " + e.what());
    }

    RobotModel model;
    model.name = doc.value("name", "unnamed");
    model.gravity = doc.value("gravity", 9.81);

    if (!doc.contains("links") || !doc.contains("joints"))
        throw SchemaError(where + ": model needs 'links' and 'joints' sections");

    for (const auto& jl : doc.at("links")) {
        Link l;
        l.name = jl.at("name").get<std::string>();
        l.mass = jl.at("mass").get<double>();
        l.com = vec2_from(jl.at("com"), where + ": link '" + l.name + "' com");
        l.inertia = jl.at("inertia").get<double>();
        model.links.push_back(l);
    }

    for (const auto& jj : doc.at("joints")) {
        Joint j;
        j.name = jj.at("name").get<std::string>();
        const std::string type = jj.at("type").get<std::string>();
        if (type == "floating-base-planar") j.type = JointType::FloatingBasePlanar;
        else if (type == "revolute") j.type = JointType::Revolute;
        else if (type == "actuated-pair") j.type = JointType::ActuatedPair;
        else throw SchemaError(where + ": joint '" + j.name + "': unknown type '" + type + "'");

        const std::string child = jj.at("child").get<std::string>();
        j.child_link = model.link_index(child);
        if (j.child_link < 0)
            throw SchemaError(where + ": joint '" + j.name + "': unknown child link '" + child + "'");
        if (jj.contains("parent")) {
            const std::string parent = jj.at("parent").get<std::string>();
            if (parent == "world") {
                j.parent_link = -1;
            } else {
                j.parent_link = model.link_index(parent);
                if (j.parent_link < 0)
                    throw SchemaError(where + ": joint '" + j.name + "': unknown parent link '" +
                                      parent + "'");
            }
        } else if (j.type != JointType::FloatingBasePlanar) {
            throw SchemaError(where + ": joint '" + j.name + "': missing parent");
        }
        if (jj.contains("anchor"))
            j.anchor = vec2_from(jj.at("anchor"), where + ": joint '" + j.name + "' anchor");
        j.axis_sign = jj.value("axis", 1.0);
        if (jj.contains("limits")) {
            const auto& lim = jj.at("limits");
            if (j.type == JointType::ActuatedPair) {
                for (int d = 0; d < 2; ++d) {
                    j.limit_lo(d) = lim.at(d).at(0).get<double>();
                    j.limit_hi(d) = lim.at(d).at(1).get<double>();
                }
            } else {
                j.limit_lo(0) = lim.at(0).get<double>();
                j.limit_hi(0) = lim.at(1).get<double>();
            }
        }
        if (jj.contains("pair_offset"))
            j.pair_offset = vec2_from(jj.at("pair_offset"), where + ": joint '" + j.name + "'");
        j.lever_pitch = jj.value("lever_pitch", j.lever_pitch);
        j.lever_roll = jj.value("lever_roll", j.lever_roll);
        model.joints.push_back(j);
    }

    if (doc.contains("actuators")) {
        for (const auto& ja : doc.at("actuators")) {
            Actuator a;
            a.id = ja.at("id").get<std::string>();
            const std::string jname = ja.at("joint").get<std::string>();
            a.joint = model.joint_index(jname);
            if (a.joint < 0)
                throw SchemaError(where + ": actuator '" + a.id + "': unknown joint '" + jname + "'");
            const std::string map = ja.value("map", "direct");
            if (map == "direct") a.map = EffortMapKind::Direct;
            else if (map == "pushrod-pair") a.map = EffortMapKind::PushrodPair;
            else throw SchemaError(where + ": actuator '" + a.id + "': unknown map '" + map + "'");
            a.rod = ja.value("rod", 0);
            model.actuators.push_back(a);
        }
    }

    if (doc.contains("contacts")) {
        for (const auto& jc : doc.at("contacts")) {
            ContactFrame c;
            c.name = jc.at("name").get<std::string>();
            const std::string link = jc.at("link").get<std::string>();
            c.link = model.link_index(link);
            if (c.link < 0)
                throw SchemaError(where + ": contact '" + c.name + "': unknown link '" + link + "'");
            if (jc.contains("offset"))
                c.offset = vec2_from(jc.at("offset"), where + ": contact '" + c.name + "'");
            const std::string kind = jc.value("kind", "flat");
            if (kind == "point") c.kind = ContactKind::Point;
            else if (kind == "flat") c.kind = ContactKind::Flat;
            else throw SchemaError(where + ": contact '" + c.name + "': unknown kind '" + kind + "'");
            model.contacts.push_back(c);
        }
    }

    model.validate();
    return model;
}

RobotModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str(), path);
}

}  // namespace thermik::dyn
