#pragma once

#include <cmath>

#include "rdf/errors.hpp"
#include "rdf/scene.hpp"
#include "rdf/vec.hpp"

namespace rdf {

struct Camera {
    double fx = 0, fy = 0, cx = 0, cy = 0;
    int width = 0, height = 0;
    Mat3 rotation = Mat3::identity();  // world-from-camera
    Vec3 translation;                  // camera center in world space

    Vec3 center() const { return translation; }
    Vec3 forward() const { return {rotation(0, 2), rotation(1, 2), rotation(2, 2)}; }

    bool contains_pixel(double u, double v) const {
        return u >= 0.0 && u < width && v >= 0.0 && v < height;
    }
};

// Ray through real-valued pixel coordinates (u, v). Integer pixel loops
// should query (col + 0.5, row + 0.5).
inline Ray generate_ray(const Camera& cam, double u, double v) {
    if (!cam.contains_pixel(u, v))
        throw InvalidParameter("generate_ray: pixel out of bounds");
    Vec3 cam_dir{(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0};
    return {cam.center(), normalized(cam.rotation * cam_dir)};
}

// Ray-surface distance D -> z-depth along the camera forward axis.
inline double distance_to_depth(double dist, const Ray& ray, const Camera& cam) {
    if (dist <= 0.0) throw InvalidParameter("distance_to_depth: distance must be positive");
    return dist * dot(ray.direction, cam.forward());
}

inline double depth_to_distance(double z, const Ray& ray, const Camera& cam) {
    if (z <= 0.0) throw InvalidParameter("depth_to_distance: depth must be positive");
    return z / dot(ray.direction, cam.forward());
}

// Projects a world point into pixel coordinates; returns false when the point
// is at or behind the camera plane. z_out receives the camera-space depth.
inline bool project_point(const Camera& cam, const Vec3& p, double& u, double& v, double& z_out) {
    Vec3 pc = cam.rotation.transposed() * (p - cam.translation);
    z_out = pc.z;
    if (pc.z <= 0.0) return false;
    u = cam.fx * pc.x / pc.z + cam.cx;
    v = cam.fy * pc.y / pc.z + cam.cy;
    return true;
}

}  // namespace rdf
